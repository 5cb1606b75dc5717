#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "interpkit/couples.hpp"
#include "interpkit/qcfun.hpp"

namespace interpkit {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Counter-based deterministic generator (splitmix64 core, Box-Muller normals).
// One instance per trial index keeps runs reproducible under concurrency.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64();
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
    double normal();
    long long uniform_int(long long lo, long long hi);  // inclusive

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct RunConfig {
    uint64_t seed = 1;
    std::string experiment;
    int trials = 10;
    int dim_source = 9;
    int dim_target = 9;
    double lambda = 2.0;
    int k_min = -6;
    int k_max = 6;
    double p_source = kInf;
    double p_target = 1.0;
    std::string rho_spec = R"({"kind":"power","theta":0.5})";
    std::string source_spec;  // optional explicit couple, JSON text
    std::string target_spec;
    int cap = 20;
    double tolerance = 1e-9;
    std::string out_csv;
    std::string out_json;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

// JSON couple/parameter-function specs shared by config files and the CLI
WeightedCouple couple_from_spec(const std::string& json_text);
QcFunction qcfun_from_spec(const std::string& json_text);

Vec read_vector_csv(const std::string& path);
void write_vector_csv(const std::string& path, const Vec& x);

struct TrialRecord {
    int trial = 0;
    std::string input_hash;  // FNV-1a over the generated doubles, hex
    double measured = 0.0;
    double bound = 0.0;
    double tolerance = 1e-9;
    bool pass = false;
    std::string detail;
};

struct Report {
    RunConfig config;
    std::vector<TrialRecord> rows;

    int failures() const;
    double max_ratio() const;  // max measured/bound over rows
    std::string to_csv() const;
    std::string to_json() const;
};

// i.i.d. entries from distribution ("normal", "uniform", "unit"), then scaled
// so couple_opnorm is exactly 1. All-zero draws are redrawn on an incremented
// stream counter; the redraw count is written to *redraws when given.
CoupleOperator generate_operator(uint64_t seed, size_t rows, size_t cols,
                                 const WeightedCouple& source,
                                 const WeightedCouple& target,
                                 const std::string& distribution,
                                 int* redraws = nullptr);

Report run(const RunConfig& config);

// runs, writes the configured outputs, and returns the process exit status
// (nonzero iff any row fails)
int run_and_write(const RunConfig& config);

}  // namespace interpkit
