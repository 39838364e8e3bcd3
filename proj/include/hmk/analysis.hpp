#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hmk/solver.hpp"

namespace hmk {

// max over samples with t + j < m of |x(t,j)|, forward part only
double window_max(const Solution& sol, double m);

// searched over the finite sequence: some tail start N in the first half
// whose running bound is not exceeded (up to growth_tol) by the second half.
// reference, if given, joins every running bound (e.g. the limit's own bound)
bool locally_eventually_bounded(const std::vector<Solution>& seq, double m, double growth_tol = 0.1,
                                double reference = 0.0);

struct Target {
    enum class Kind { Points, Box } kind = Kind::Points;
    std::vector<Vec> points;
    Vec lo, hi;

    static Target point_set(std::vector<Vec> pts);
    static Target box(Vec lo, Vec hi);
};

// plant coordinates at 0, clock coordinates over their range
Target origin_target(const SystemData& s);

double dist_to_set(const Vec& x, const Target& W);

struct KLBound {
    double C = 1.0;
    double mu = 1.0;
    double eps = 0.0;

    double beta(double r, double s) const { return C * r * std::exp(-mu * s); }
};

void validate_kl(const KLBound& b);

struct KLReport {
    double r0 = 0.0;            // sup of |.|_W over the initial memory arc
    double worst_margin = 0.0;  // min over samples of bound - |x|_W
    bool pass = true;
    std::optional<std::pair<double, int>> first_violation;
    std::size_t samples = 0;
};

KLReport check_kl(const Solution& sol, const Target& W, const KLBound& b);

struct ConvergenceReport {
    std::vector<double> deltas;
    std::vector<double> distances;              // d(x_i, x_nominal)
    std::vector<std::string> statuses;
    std::vector<std::vector<double>> view_distances;  // per run, at the probe points
    std::vector<std::pair<double, int>> probes;
    std::string nominal_status;
    bool bounded = true;
    bool nonincreasing = true;
    double slack = 1e-3;
    double limit_flow_residual = 0.0;
    double limit_jump_gap = 0.0;
    bool limit_residual_ok = true;
    std::vector<std::string> errors;  // per-run solver errors, empty string if none
};

struct ExperimentOptions {
    SolveOptions solve;
    PerturbOptions perturb;
    double slack = 1e-3;
    double residual_tol = 0.1;
};

ConvergenceReport wellposedness_experiment(const SystemData& s, Radius rho, const std::vector<double>& deltas,
                                           const HybridArc& history, const ExperimentOptions& opt);

struct RobustRun {
    double delta = 0.0;
    int history = 0;
    std::string status;
    KLReport kl;
    bool monotone_in_eps = true;
};

struct RobustnessReport {
    std::vector<RobustRun> runs;
    std::optional<double> largest_passing_delta;
    bool monotone_in_eps = true;
    bool nominal_pass = true;
};

RobustnessReport robustness_experiment(const SystemData& s, const Target& W, const KLBound& b, Radius rho,
                                       const std::vector<double>& deltas, const std::vector<HybridArc>& histories,
                                       const ExperimentOptions& opt);

}  // namespace hmk
