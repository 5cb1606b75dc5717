#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "interpkit/harness.hpp"
#include "interpkit/nuclear.hpp"
#include "interpkit/repr.hpp"
#include "interpkit/retract.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw interpkit::ConfigError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ExperimentArgs {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    long long seed = -1;
    // one-shot element pair, accepted by jk-gap and nuclear-check instead of --config
    std::string source_path, target_path, x_path, y_path;
    double lambda = 2.0;
    std::string method = "lp";
    std::string witness_path = "witness.csv";
};

void add_experiment(CLI::App& app, const std::string& name, const std::string& desc,
                    std::vector<std::pair<std::string, ExperimentArgs>>& runs,
                    bool one_shot = false) {
    auto args = std::make_shared<ExperimentArgs>();
    CLI::App* sub = app.add_subcommand(name, desc);
    CLI::Option* cfg = sub->add_option("--config", args->config_path,
                                       "run configuration (JSON)");
    if (one_shot) {
        sub->add_option("--source", args->source_path, "source couple spec (JSON)");
        sub->add_option("--target", args->target_path, "target couple spec (JSON)");
        sub->add_option("--x", args->x_path, "source element CSV");
        sub->add_option("--y", args->y_path, "target element CSV");
        sub->add_option("--lambda", args->lambda, "scale base");
        sub->add_option("--method", args->method, "gap method")
            ->check(CLI::IsMember({"lp", "greedy"}));
        sub->add_option("--witness-out", args->witness_path, "witness CSV path");
    } else {
        cfg->required();
    }
    sub->add_option("--out", args->out_path, "report output path");
    sub->add_option("--format", args->format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--seed", args->seed, "override the config seed");
    sub->callback([&runs, name, args]() { runs.emplace_back(name, *args); });
}

// one-shot jk-gap / nuclear-check on explicit couples and vectors
int run_one_shot(const std::string& name, const ExperimentArgs& args) {
    if (args.source_path.empty() || args.target_path.empty() || args.x_path.empty() ||
        args.y_path.empty()) {
        throw interpkit::ConfigError(name + ": give either --config or all of "
                                            "--source/--target/--x/--y");
    }
    interpkit::WeightedCouple source = interpkit::couple_from_spec(slurp(args.source_path));
    interpkit::WeightedCouple target = interpkit::couple_from_spec(slurp(args.target_path));
    interpkit::Vec x = interpkit::read_vector_csv(args.x_path);
    interpkit::Vec y = interpkit::read_vector_csv(args.y_path);
    nlohmann::json out;
    if (name == "jk-gap") {
        interpkit::GapMethod method = args.method == "greedy" ? interpkit::GapMethod::Greedy
                                                              : interpkit::GapMethod::LpExact;
        interpkit::GapCertificate cert =
            interpkit::jk_gap(source, x, target, y, args.lambda, method);
        std::ofstream w(args.witness_path, std::ios::binary);
        if (!w) throw interpkit::ConfigError("cannot write " + args.witness_path);
        w << "k";
        for (size_t n = 0; n < target.size(); ++n) w << ",y" << n;
        w << "\n";
        for (const auto& [k, part] : cert.witness.parts) {
            w << k;
            for (double v : part) w << "," << fmt(v);
            w << "\n";
        }
        out["value"] = cert.infinite ? "inf" : fmt(cert.value);
        out["method"] = args.method;
        out["witness_csv_path"] = args.witness_path;
        if (!cert.note.empty()) out["note"] = cert.note;
    } else {
        interpkit::NuclearityReport rep =
            interpkit::nuclearity_equivalence_test(source, target, x, y, args.lambda);
        out["gap"] = fmt(rep.gap);
        out["nu"] = fmt(rep.nu);
        out["factor_gap_over_nu"] = fmt(rep.factor_gap_over_nu);
        out["factor_nu_over_gap"] = fmt(rep.factor_nu_over_gap);
    }
    std::string text = out.dump(2) + "\n";
    if (args.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream o(args.out_path, std::ios::binary);
        o << text;
    }
    return 0;
}

int run_experiment(const std::string& name, const ExperimentArgs& args) {
    if (args.config_path.empty()) return run_one_shot(name, args);
    interpkit::RunConfig cfg = interpkit::load_config(args.config_path);
    cfg.experiment = name;
    if (args.seed >= 0) cfg.seed = static_cast<uint64_t>(args.seed);
    if (!args.out_path.empty()) {
        if (args.format == "json") {
            cfg.out_json = args.out_path;
        } else {
            cfg.out_csv = args.out_path;
        }
    }
    interpkit::Report rep = interpkit::run(cfg);
    if (!cfg.out_csv.empty()) {
        std::ofstream out(cfg.out_csv, std::ios::binary);
        out << rep.to_csv();
    }
    if (!cfg.out_json.empty()) {
        std::ofstream out(cfg.out_json, std::ios::binary);
        out << rep.to_json();
    }
    if (args.out_path.empty()) {
        std::cout << (args.format == "json" ? rep.to_json() : rep.to_csv());
    }
    int status = rep.failures() == 0 ? 0 : 1;
    std::cerr << "trials=" << rep.rows.size() << " failures=" << rep.failures()
              << " max_ratio=" << fmt(rep.max_ratio()) << "\n";
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted-couple interpolation toolkit"};
    app.require_subcommand(1);

    std::vector<std::pair<std::string, ExperimentArgs>> runs;
    for (const char* name : {"verify-ovch", "sparse-seq", "diag-sums", "rearrange-norms",
                             "fundlemma", "retract-check"}) {
        add_experiment(app, name, std::string("batch experiment: ") + name, runs);
    }
    add_experiment(app, "jk-gap", "batch experiment or one-shot gap certificate", runs,
                   true);
    add_experiment(app, "nuclear-check", "batch experiment or one-shot nuclearity factors",
                   runs, true);

    // one-shot calculators
    std::string couple_path, x_path, out_path;
    double t_value = 1.0, lambda = 2.0;
    long long k_lo = 0;

    CLI::App* kfun = app.add_subcommand("kfun", "K-functional of a vector");
    kfun->add_option("--couple", couple_path, "couple spec (JSON)")->required();
    kfun->add_option("--x", x_path, "vector CSV")->required();
    kfun->add_option("--t", t_value, "parameter t")->required();

    CLI::App* jfun = app.add_subcommand("jfun", "J-functional of a vector");
    jfun->add_option("--couple", couple_path, "couple spec (JSON)")->required();
    jfun->add_option("--x", x_path, "vector CSV")->required();
    jfun->add_option("--t", t_value, "parameter t")->required();

    CLI::App* cal = app.add_subcommand("calderon", "discrete smoothing transform");
    cal->add_option("--c", x_path, "sequence CSV")->required();
    cal->add_option("--k-lo", k_lo, "label of the first entry")->required();
    cal->add_option("--lambda", lambda, "scale base");
    cal->add_option("--out", out_path, "output CSV (stdout when omitted)");

    CLI::App* part = app.add_subcommand("partition", "weight-ratio block partition");
    part->add_option("--couple", couple_path, "couple spec (JSON)")->required();
    part->add_option("--lambda", lambda, "scale base");

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& [name, args] : runs) return run_experiment(name, args);
        if (kfun->parsed()) {
            interpkit::WeightedCouple c = interpkit::couple_from_spec(slurp(couple_path));
            interpkit::Vec x = interpkit::read_vector_csv(x_path);
            std::cout << fmt(interpkit::k_exact(c, t_value, x)) << "\n";
            return 0;
        }
        if (jfun->parsed()) {
            interpkit::WeightedCouple c = interpkit::couple_from_spec(slurp(couple_path));
            interpkit::Vec x = interpkit::read_vector_csv(x_path);
            std::cout << fmt(interpkit::j_functional(c, t_value, x)) << "\n";
            return 0;
        }
        if (cal->parsed()) {
            interpkit::Vec c = interpkit::read_vector_csv(x_path);
            std::vector<double> out = interpkit::calderon(c, k_lo, lambda);
            if (out_path.empty()) {
                for (double v : out) std::cout << fmt(v) << "\n";
            } else {
                interpkit::write_vector_csv(out_path, out);
            }
            return 0;
        }
        if (part->parsed()) {
            interpkit::WeightedCouple c = interpkit::couple_from_spec(slurp(couple_path));
            interpkit::BlockPartition bp = interpkit::partition(c, lambda);
            for (const auto& [k, idx] : bp.blocks) {
                std::cout << k << ":";
                for (size_t n : idx) std::cout << " " << n;
                std::cout << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
