#pragma once

#include <vector>

namespace interpkit {

// Small dense LP: minimize c.x subject to rows (a.x rel b), x >= 0,
// rel in {'<', '>', '='}. Two-phase primal simplex with Bland's rule,
// deterministic, intended for desk-scale problems (a few hundred variables).
struct LinearProgram {
    int num_vars = 0;
    std::vector<double> c;
    struct Row {
        std::vector<double> a;
        char rel = '<';
        double b = 0.0;
    };
    std::vector<Row> rows;
};

struct LpResult {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Optimal;
    double objective = 0.0;
    std::vector<double> x;
};

LpResult solve_lp(const LinearProgram& lp);

}  // namespace interpkit
