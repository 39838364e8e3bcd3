#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hmk/system.hpp"

namespace hmk {

enum class Priority { JumpFirst, FlowFirst };
enum class Integrator { Euler, RK4 };
enum class Selector { First, Random };
enum class Status { Complete, BlowUp, StuckOutsideCD, JumpCapReached };

const char* status_name(Status s);

struct SolveOptions {
    double h = 0.01;
    double T = 10.0;
    int J = 100;
    Priority priority = Priority::JumpFirst;
    Integrator integrator = Integrator::Euler;
    double blowup_threshold = 1e8;
    double event_tol = 1e-9;    // bisection tolerance on the step length
    double margin_tol = 1e-7;   // a margin <= margin_tol counts as inside
    Selector selector = Selector::First;
    std::uint64_t seed = 0;
};

struct JumpRecord {
    double t = 0.0;
    int j = 0;  // index before the jump
    Vec pre;
    Vec post;
};

struct Solution {
    HybridArc arc;
    Status status = Status::Complete;
    std::vector<JumpRecord> jumps;
    double t_end = 0.0;
    int j_end = 0;
    std::string note;
};

// history is a memory arc (segments with j <= 0, ending at t = 0)
Solution solve(const SystemData& s, const HybridArc& history, const SolveOptions& opt);
Solution solve(const SystemData& s, const MemoryArc& phi0, const SolveOptions& opt);

struct ResidualReport {
    double flow_residual = 0.0;  // max dist(difference quotient, hull of F at both step ends)
    std::size_t flow_samples = 0;
    std::size_t jumps = 0;
    bool jumps_in_D = true;
    bool jumps_exact = true;
    bool domain_valid = true;
    bool ok(double bound) const { return flow_residual <= bound && jumps_in_D && jumps_exact && domain_valid; }
};

ResidualReport solution_residuals(const SystemData& s, const Solution& sol, double margin_tol = 1e-7);

struct EulerApprox {
    HybridArc arc;
    double lambda = 0.0;
    double budget = 0.0;
    int steps = 0;
    bool hit_jump_set = false;
};

EulerApprox euler_approximation(const SystemData& s, const HybridArc& history, double eps, double T0,
                                double a = 1.0);

// largest |x - y| over common sample times of matching jump indices, on the
// overlap of their time intervals
double overlap_sup_distance(const HybridArc& x, const HybridArc& y);

struct RefineReport {
    std::vector<double> steps;
    std::vector<Status> statuses;
    std::vector<double> uniform;    // between consecutive solutions
    std::vector<double> graphical;  // between consecutive solutions
    std::vector<double> ratios;     // local orders from consecutive pairs
    double order = 0.0;             // least-squares fit, NaN with < 2 gaps
    // gaps at shared sample times; free of interpolation error, so this
    // tracks the integrator order where the uniform gap saturates at 2
    std::vector<double> node;
    double node_order = 0.0;
};

RefineReport refine_study(const SystemData& s, const HybridArc& history, const std::vector<double>& steps,
                          SolveOptions opt);

struct ContinuityReport {
    std::vector<double> exceptional;  // Theta, excluded from the grid
    std::vector<std::pair<double, double>> increments;  // (dt, max graphical increment)
    bool pass = false;
};

ContinuityReport continuity_check(const HybridArc& arc, int j, double delta, int base_points = 8);

}  // namespace hmk
