#include "interpkit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "interpkit/janson.hpp"
#include "interpkit/nuclear.hpp"
#include "interpkit/qcfun.hpp"
#include "interpkit/rearrange.hpp"
#include "interpkit/repr.hpp"
#include "interpkit/retract.hpp"

namespace interpkit {

using nlohmann::json;

uint64_t Rng::next_u64() {
    // splitmix64
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 == 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

long long Rng::uniform_int(long long lo, long long hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo + 1);
    return lo + static_cast<long long>(next_u64() % span);
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class Fnv {
public:
    void add(double v) {
        unsigned char b[sizeof(double)];
        std::memcpy(b, &v, sizeof(double));
        for (unsigned char c : b) {
            h_ ^= c;
            h_ *= 0x100000001b3ULL;
        }
    }
    void add(const Vec& v) {
        for (double x : v) add(x);
    }
    std::string hex() const {
        char buf[20];
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    uint64_t h_ = 0xcbf29ce484222325ULL;
};

double parse_p(const json& j, const std::string& field) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
        throw ConfigError("field '" + field + "': unrecognized p value '" + s + "'");
    }
    if (j.is_number()) return j.get<double>();
    throw ConfigError("field '" + field + "': p must be a number or \"inf\"");
}

WeightedCouple couple_from_json(const json& j, const std::string& field) {
    WeightedCouple c;
    if (j.contains("lambda_adic")) {
        const json& s = j.at("lambda_adic");
        double lambda = s.value("lambda", 2.0);
        int klo = s.value("k_min", -6), khi = s.value("k_max", 6);
        double p = s.contains("p") ? parse_p(s.at("p"), field) : kInf;
        return WeightedCouple::lambda_adic(lambda, klo, khi, p);
    }
    if (!j.contains("w0") || !j.contains("w1")) {
        throw ConfigError("field '" + field + "': couple needs w0/w1 or lambda_adic");
    }
    c.w0 = j.at("w0").get<Vec>();
    c.w1 = j.at("w1").get<Vec>();
    if (j.contains("labels")) {
        c.labels = j.at("labels").get<std::vector<long long>>();
    } else {
        for (size_t n = 0; n < c.w0.size(); ++n) c.labels.push_back(static_cast<long long>(n));
    }
    c.p = j.contains("p") ? parse_p(j.at("p"), field) : kInf;
    c.validate();
    return c;
}

QcFunction qcfun_from_json(const json& j, const std::string& field) {
    std::string kind = j.value("kind", "power");
    if (kind == "power") return QcFunction::power_law(j.value("theta", 0.5));
    if (kind == "power_log") {
        return QcFunction::power_log(j.value("theta", 0.5), j.value("beta", 1.0));
    }
    if (kind == "min_affine") {
        std::vector<std::pair<double, double>> pairs;
        for (const auto& row : j.at("pairs")) {
            pairs.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
        }
        return QcFunction::min_affine(std::move(pairs));
    }
    if (kind == "concave_majorant") {
        std::vector<std::pair<double, double>> samples;
        for (const auto& row : j.at("samples")) {
            samples.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
        }
        return QcFunction::concave_majorant(std::move(samples));
    }
    throw ConfigError("field '" + field + "': unknown parameter function kind '" + kind + "'");
}

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

const std::vector<std::string> kExperiments = {
    "verify-ovch", "jk-gap",          "nuclear-check", "sparse-seq",
    "diag-sums",   "rearrange-norms", "fundlemma",     "retract-check"};

WeightedCouple random_couple(Rng& rng, size_t n, double p, Fnv& hash) {
    WeightedCouple c;
    c.p = p;
    for (size_t i = 0; i < n; ++i) {
        c.labels.push_back(static_cast<long long>(i));
        c.w0.push_back(std::exp(rng.uniform(-1.5, 1.5)));
        c.w1.push_back(std::exp(rng.uniform(-1.5, 1.5)));
        hash.add(c.w0.back());
        hash.add(c.w1.back());
    }
    c.validate();
    return c;
}

Vec random_signed_vec(Rng& rng, size_t n, Fnv& hash) {
    Vec x(n);
    for (size_t i = 0; i < n; ++i) {
        double mag = rng.uniform(0.5, 2.0);
        x[i] = (rng.next_u64() & 1) ? mag : -mag;
        hash.add(x[i]);
    }
    return x;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j = parse_json_text(json_text, "config parse error");
    RunConfig c;
    try {
        c.seed = j.value("seed", 1ULL);
        c.experiment = j.value("experiment", std::string());
        c.trials = j.value("trials", 10);
        c.dim_source = j.value("dim_source", j.value("dim", 9));
        c.dim_target = j.value("dim_target", j.value("dim", 9));
        c.lambda = j.value("lambda", 2.0);
        c.k_min = j.value("k_min", -6);
        c.k_max = j.value("k_max", 6);
        if (j.contains("p_source")) c.p_source = parse_p(j.at("p_source"), "p_source");
        if (j.contains("p_target")) c.p_target = parse_p(j.at("p_target"), "p_target");
        if (j.contains("rho")) c.rho_spec = j.at("rho").dump();
        if (j.contains("source")) c.source_spec = j.at("source").dump();
        if (j.contains("target")) c.target_spec = j.at("target").dump();
        c.cap = j.value("cap", exact_norm_cap());
        c.tolerance = j.value("tolerance", 1e-9);
        c.out_csv = j.value("out_csv", std::string());
        c.out_json = j.value("out_json", std::string());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field error: ") + e.what());
    }
    if (c.trials < 0) throw ConfigError("field 'trials': must be nonnegative");
    if (c.cap < 1) throw ConfigError("field 'cap': must be at least 1");
    if (!(c.lambda > 1.0)) throw ConfigError("field 'lambda': must exceed 1");
    if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) ==
        kExperiments.end()) {
        throw ConfigError("field 'experiment': unknown value '" + c.experiment + "'");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

WeightedCouple couple_from_spec(const std::string& json_text) {
    return couple_from_json(parse_json_text(json_text, "couple spec"), "couple");
}

QcFunction qcfun_from_spec(const std::string& json_text) {
    return qcfun_from_json(parse_json_text(json_text, "rho spec"), "rho");
}

Vec read_vector_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open vector file: " + path);
    Vec out;
    std::string tok;
    while (in) {
        int ch = in.get();
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == ' ' || ch == '\t' || ch == EOF) {
            if (!tok.empty()) {
                size_t pos = 0;
                double v = std::stod(tok, &pos);
                if (pos != tok.size()) throw ConfigError("bad number in " + path + ": " + tok);
                out.push_back(v);
                tok.clear();
            }
        } else {
            tok.push_back(static_cast<char>(ch));
        }
    }
    return out;
}

void write_vector_csv(const std::string& path, const Vec& x) {
    std::ofstream out(path);
    for (double v : x) out << fmt(v) << "\n";
}

int Report::failures() const {
    int n = 0;
    for (const auto& r : rows) n += r.pass ? 0 : 1;
    return n;
}

double Report::max_ratio() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, safe_ratio(r.measured, r.bound));
    return m;
}

std::string Report::to_csv() const {
    std::string out = "trial,input_hash,measured,bound,tolerance,pass,detail\n";
    for (const auto& r : rows) {
        out += std::to_string(r.trial) + "," + r.input_hash + "," + fmt(r.measured) + "," +
               fmt(r.bound) + "," + fmt(r.tolerance) + "," + (r.pass ? "1" : "0") + "," +
               r.detail + "\n";
    }
    return out;
}

std::string Report::to_json() const {
    json j;
    j["experiment"] = config.experiment;
    j["seed"] = config.seed;
    j["trials"] = config.trials;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"trial", r.trial},
                             {"input_hash", r.input_hash},
                             {"measured", r.measured},
                             {"bound", r.bound},
                             {"tolerance", r.tolerance},
                             {"pass", r.pass},
                             {"detail", r.detail}});
    }
    j["summary"] = {{"failures", failures()}, {"max_ratio", max_ratio()}};
    return j.dump(2) + "\n";
}

CoupleOperator generate_operator(uint64_t seed, size_t rows, size_t cols,
                                 const WeightedCouple& source, const WeightedCouple& target,
                                 const std::string& distribution, int* redraws) {
    if (rows != target.size() || cols != source.size()) {
        throw std::invalid_argument("generate_operator: dims must match the couples");
    }
    if (distribution != "normal" && distribution != "uniform" && distribution != "unit") {
        throw ConfigError("generate_operator: unknown distribution '" + distribution + "'");
    }
    CoupleOperator T;
    T.source = source;
    T.target = target;
    int attempts = 0;
    for (;; ++attempts) {
        Rng rng(seed + 0x632be59bd9b4e019ULL * static_cast<uint64_t>(attempts));
        Matrix m(rows, cols);
        if (distribution == "unit") {
            m.at(0, 0) = 1.0;
        } else {
            for (size_t i = 0; i < rows; ++i) {
                for (size_t j = 0; j < cols; ++j) {
                    m.at(i, j) = distribution == "uniform" ? rng.uniform(-1.0, 1.0)
                                                           : rng.normal();
                }
            }
        }
        bool all_zero = std::all_of(m.a.begin(), m.a.end(),
                                    [](double v) { return v == 0.0; });
        if (all_zero) continue;
        T.m = std::move(m);
        double nrm = couple_opnorm(T).value;
        for (double& v : T.m.a) v /= nrm;
        break;
    }
    if (redraws) *redraws = attempts;
    return T;
}

namespace {

TrialRecord trial_verify_ovch(const RunConfig& cfg, int trial) {
    TrialRecord rec;
    WeightedCouple source =
        cfg.source_spec.empty()
            ? WeightedCouple::lambda_adic(cfg.lambda, cfg.k_min, cfg.k_max, kInf)
            : couple_from_spec(cfg.source_spec);
    WeightedCouple target =
        cfg.target_spec.empty()
            ? WeightedCouple::lambda_adic(cfg.lambda, cfg.k_min, cfg.k_max, 1.0)
            : couple_from_spec(cfg.target_spec);
    CoupleOperator T = generate_operator(cfg.seed * 1000003ULL + trial, target.size(),
                                         source.size(), source, target, "normal");
    Fnv hash;
    hash.add(T.m.a);
    QcFunction rho = qcfun_from_spec(cfg.rho_spec);
    OvchReport rep = verify_ovchinnikov(T, rho, cfg.tolerance);
    rec.input_hash = hash.hex();
    rec.measured = rep.c_rho;
    rec.bound = rep.bound;
    rec.pass = rep.pass && rep.exact;
    rec.detail = "c_base=" + fmt(rep.c_base) + ";eps_sum=" + fmt(rep.eps_sum) +
                 ";exact=" + (rep.exact ? std::string("1") : std::string("0"));
    return rec;
}

TrialRecord trial_jk_gap(const RunConfig& cfg, int trial) {
    TrialRecord rec;
    Fnv hash;
    Rng rng(cfg.seed * 1000003ULL + trial);
    WeightedCouple source = random_couple(rng, cfg.dim_source, kInf, hash);
    WeightedCouple target = random_couple(rng, cfg.dim_target, 1.0, hash);
    Vec x = random_signed_vec(rng, source.size(), hash);
    Vec y = random_signed_vec(rng, target.size(), hash);
    GapCertificate lp = jk_gap(source, x, target, y, cfg.lambda, GapMethod::LpExact);
    GapCertificate greedy = jk_gap(source, x, target, y, cfg.lambda, GapMethod::Greedy);
    rec.input_hash = hash.hex();
    rec.measured = lp.value;
    rec.bound = greedy.value;
    rec.pass = !lp.infinite && !greedy.infinite &&
               lp.value <= greedy.value * (1.0 + 1e-9) + cfg.tolerance;
    rec.detail = std::string("lp_fell_back=") + (lp.lp_fell_back ? "1" : "0") + ";" + lp.note;
    return rec;
}

TrialRecord trial_nuclear(const RunConfig& cfg, int trial) {
    TrialRecord rec;
    Fnv hash;
    Rng rng(cfg.seed * 1000003ULL + trial);
    WeightedCouple source = random_couple(rng, cfg.dim_source, kInf, hash);
    WeightedCouple target = random_couple(rng, cfg.dim_target, 1.0, hash);
    Vec x = random_signed_vec(rng, source.size(), hash);
    Vec y = random_signed_vec(rng, target.size(), hash);
    NuclearityReport rep = nuclearity_equivalence_test(source, target, x, y, cfg.lambda);
    rec.input_hash = hash.hex();
    rec.measured = rep.gap;
    rec.bound = cfg.lambda * rep.nu;
    rec.pass = rep.gap_le_lambda_nu && rep.nu_le_two_gap;
    rec.detail = "nu=" + fmt(rep.nu) + ";nu_le_two_gap=" + (rep.nu_le_two_gap ? "1" : "0");
    return rec;
}

TrialRecord trial_sparse_seq(const RunConfig& cfg, int trial) {
    TrialRecord rec;
    Fnv hash;
    Rng rng(cfg.seed * 1000003ULL + trial);
    double theta = rng.uniform(0.1, 0.9);
    hash.add(theta);
    QcFunction rho = QcFunction::power_law(theta);
    SparseSequence s = sparse_tau(rho, cfg.k_min, cfg.k_max);
    for (double t : s.tau) hash.add(t);
    double worst = 0.0;
    for (int j = s.k_min; j <= s.k_max; ++j) {
        for (int k = s.k_min; k <= s.k_max; ++k) {
            double lhs = std::min(1.0, s.at(j) / s.at(k)) * rho(s.at(k)) / rho(s.at(j));
            worst = std::max(worst, lhs * std::pow(2.0, std::abs(j - k)));
        }
    }
    // majorant reconstruction with constant 2 on a log grid inside the span
    for (double t : log_grid(s.tau.front(), s.tau.back(), 100)) {
        double sup = 0.0;
        for (double tk : s.tau) sup = std::max(sup, std::min(1.0, t / tk) * rho(tk));
        worst = std::max(worst, rho(t) / (2.0 * sup));
    }
    rec.input_hash = hash.hex();
    rec.measured = worst;
    rec.bound = 1.0;
    rec.pass = worst <= 1.0 + cfg.tolerance;
    rec.detail = "theta=" + fmt(theta);
    return rec;
}

TrialRecord trial_diag_sums(const RunConfig& cfg, int trial) {
    TrialRecord rec;
    Fnv hash;
    Rng rng(cfg.seed * 1000003ULL + trial);
    size_t rows = static_cast<size_t>(rng.uniform_int(2, cfg.dim_target));
    size_t cols = static_cast<size_t>(rng.uniform_int(2, cfg.dim_source));
    WeightedCouple source = random_couple(rng, cols, kInf, hash);
    WeightedCouple target = random_couple(rng, rows, 1.0, hash);
    CoupleOperator T = generate_operator(cfg.seed * 2000003ULL + trial, rows, cols, source,
                                         target, "normal");
    hash.add(T.m.a);
    Matrix A = scaled_matrix(T);
    auto sums = diagonal_sums(A, target.labels, source.labels);
    OpNorm nrm = opnorm_inf_to_1(A, Vec(A.cols, 1.0), Vec(A.rows, 1.0));
    double worst = 0.0;
    for (const auto& [m, v] : sums) worst = std::max(worst, v);
    rec.input_hash = hash.hex();
    rec.measured = worst;
    rec.bound = nrm.value;
    rec.pass = nrm.exact && worst <= nrm.value + cfg.tolerance;
    rec.detail = std::string("exact=") + (nrm.exact ? "1" : "0");
    return rec;
}

TrialRecord trial_rearrange(const RunConfig& cfg, int trial) {
    TrialRecord rec;
    Fnv hash;
    Rng rng(cfg.seed * 1000003ULL + trial);
    size_t n = static_cast<size_t>(rng.uniform_int(2, 6));
    StepFunction f;
    for (size_t i = 0; i < n; ++i) {
        f.t.push_back(0.5 * (i + 1));
        f.v.push_back(rng.uniform(0.0, 3.0));
        hash.add(f.v.back());
    }
    StepFunction g = f;
    for (size_t i = n; i > 1; --i) {
        size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<long long>(i) - 1));
        std::swap(g.v[i - 1], g.v[j]);
    }
    QcFunction psi = QcFunction::power_law(0.5);
    QcFunction phi = QcFunction::power_law(0.5);
    double dm = std::fabs(m_norm(psi, f) - m_norm(psi, g));
    double dl = std::fabs(lambda_norm(phi, f) - lambda_norm(phi, g));
    EmbeddingReport emb = embedding_checks(psi, phi, g);
    rec.input_hash = hash.hex();
    rec.measured = emb.hl_lhs;
    rec.bound = emb.hl_rhs;
    rec.pass = emb.hardy_littlewood && emb.linf_embeds && dm <= 1e-12 && dl <= 1e-12;
    rec.detail = "perm_gap_m=" + fmt(dm) + ";perm_gap_l=" + fmt(dl);
    return rec;
}

TrialRecord trial_fundlemma(const RunConfig& cfg, int trial) {
    TrialRecord rec;
    Fnv hash;
    Rng rng(cfg.seed * 1000003ULL + trial);
    WeightedCouple c = random_couple(rng, cfg.dim_source, 1.0, hash);
    Vec a = random_signed_vec(rng, c.size(), hash);
    Representation rep = fundamental_representation(c, a, cfg.lambda);
    double worst = 0.0;
    for (const auto& [k, part] : rep.parts) {
        double t = std::pow(cfg.lambda, static_cast<double>(k));
        worst = std::max(worst, safe_ratio(j_functional(c, t, part), k_exact(c, t, a)));
    }
    double cprime = strong_form_check(c, rep, a);
    rec.input_hash = hash.hex();
    rec.measured = std::max(worst, cprime);
    rec.bound = cfg.lambda;
    rec.pass = rec.measured <= cfg.lambda + cfg.tolerance;
    rec.detail = "jk_ratio=" + fmt(worst) + ";strong_form=" + fmt(cprime);
    return rec;
}

TrialRecord trial_retract(const RunConfig& cfg, int trial) {
    TrialRecord rec;
    Fnv hash;
    Rng rng(cfg.seed * 1000003ULL + trial);
    double p = (trial % 2 == 0) ? kInf : 1.0;
    WeightedCouple c = random_couple(rng, cfg.dim_source, p, hash);
    Vec x = random_signed_vec(rng, c.size(), hash);
    BlockPartition part = partition(c, cfg.lambda);
    IotaResult ir = iota(c, part, x);
    Vec recon = pi(c, part, x, ir, ir.s);
    double recon_err = 0.0;
    for (size_t nIdx = 0; nIdx < x.size(); ++nIdx) {
        recon_err = std::max(recon_err,
                             std::fabs(recon[nIdx] - x[nIdx]) / std::fabs(x[nIdx]));
    }
    WeightedCouple bc = block_couple(ir.block_labels, cfg.lambda, p);
    double iota_norm = 0.0;
    for (int side = 0; side < 2; ++side) {
        iota_norm = std::max(iota_norm, safe_ratio(norm_side(bc, side, ir.s),
                                                   norm_side(c, side, x)));
    }
    // the projection is linear: entries x_n / s_{phi(n)} in the phi(n) column
    Matrix P(c.size(), ir.block_labels.size());
    for (size_t nIdx = 0; nIdx < c.size(); ++nIdx) {
        size_t col = static_cast<size_t>(
            std::lower_bound(ir.block_labels.begin(), ir.block_labels.end(),
                             part.phi[nIdx]) -
            ir.block_labels.begin());
        P.at(nIdx, col) = x[nIdx] / ir.s[col];
    }
    double pi_norm = 0.0;
    for (int side = 0; side < 2; ++side) {
        const Vec& u = side == 0 ? bc.w0 : bc.w1;
        const Vec& v = side == 0 ? c.w0 : c.w1;
        pi_norm = std::max(pi_norm, opnorm_same_p(P, u, v, p).value);
    }
    rec.input_hash = hash.hex();
    rec.measured = pi_norm;
    rec.bound = cfg.lambda;
    rec.pass = recon_err <= 1e-12 && iota_norm <= 1.0 + cfg.tolerance &&
               pi_norm <= cfg.lambda + cfg.tolerance;
    rec.detail = "recon_err=" + fmt(recon_err) + ";iota_norm=" + fmt(iota_norm);
    return rec;
}

}  // namespace

Report run(const RunConfig& config) {
    Report rep;
    rep.config = config;
    int saved_cap = exact_norm_cap();
    set_exact_norm_cap(config.cap);
    try {
        for (int trial = 0; trial < config.trials; ++trial) {
            TrialRecord rec;
            if (config.experiment == "verify-ovch") {
                rec = trial_verify_ovch(config, trial);
            } else if (config.experiment == "jk-gap") {
                rec = trial_jk_gap(config, trial);
            } else if (config.experiment == "nuclear-check") {
                rec = trial_nuclear(config, trial);
            } else if (config.experiment == "sparse-seq") {
                rec = trial_sparse_seq(config, trial);
            } else if (config.experiment == "diag-sums") {
                rec = trial_diag_sums(config, trial);
            } else if (config.experiment == "rearrange-norms") {
                rec = trial_rearrange(config, trial);
            } else if (config.experiment == "fundlemma") {
                rec = trial_fundlemma(config, trial);
            } else if (config.experiment == "retract-check") {
                rec = trial_retract(config, trial);
            } else {
                throw ConfigError("unknown experiment: " + config.experiment);
            }
            rec.trial = trial;
            rec.tolerance = config.tolerance;
            rep.rows.push_back(std::move(rec));
        }
    } catch (...) {
        set_exact_norm_cap(saved_cap);
        throw;
    }
    set_exact_norm_cap(saved_cap);
    return rep;
}

int run_and_write(const RunConfig& config) {
    Report rep = run(config);
    if (!config.out_csv.empty()) {
        std::ofstream out(config.out_csv, std::ios::binary);
        out << rep.to_csv();
    }
    if (!config.out_json.empty()) {
        std::ofstream out(config.out_json, std::ios::binary);
        out << rep.to_json();
    }
    return rep.failures() == 0 ? 0 : 1;
}

}  // namespace interpkit
