#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hmk/domain.hpp"

namespace hmk {

using Margin = std::function<double(const MemoryArc&)>;
using SetMap = std::function<std::vector<Vec>(const MemoryArc&)>;
using Radius = std::function<double(const MemoryArc&)>;

// state coordinate that behaves like a clock; used for target sets of the
// form "plant at the origin, clock anywhere in [lo, hi]"
struct ClockRange {
    int index = 0;
    double lo = 0.0;
    double hi = 0.0;
};

// Margins are <= 0 inside the set.  Maps return the vertices of a convex
// hull; an empty vector means the map is empty at that memory arc.
struct SystemData {
    std::string name;
    int n = 0;
    double delta = 0.0;
    Margin flow_margin;
    Margin jump_margin;
    SetMap flow_map;
    SetMap jump_map;
    std::function<double(double)> lambda_of_b;
    double gain_C = 1.0;
    double gain_D = 1.0;
    std::vector<ClockRange> clocks;
    // full state for a scalar initial value x0; used for canonical histories
    std::function<Vec(double)> rest_state;
};

bool in_flow(const SystemData& s, const MemoryArc& phi, double tol = 0.0);
bool in_jump(const SystemData& s, const MemoryArc& phi, double tol = 0.0);

Radius constant_radius(double r);

struct PerturbOptions {
    int samples = 16;     // perturbed memory arcs per evaluation
    int directions = 8;   // unit-ball directions, used in +/- pairs
    std::uint64_t seed = 0;
};

struct PerturbedSystem {
    SystemData base;
    Radius rho;
    double scale = 0.0;
    SystemData data;  // the perturbed system, usable wherever SystemData is
};

PerturbedSystem perturb(const SystemData& s, Radius rho, double scale, const PerturbOptions& opt = {});

struct ViabilityResult {
    Vec v;
    double h = 0.0;
    MemoryArc psi;  // the extended memory arc, owns its samples
};

// linear continuation x_h(s) = phi(0,0) + s v, grafted onto phi and trimmed
MemoryArc extend_linear(const MemoryArc& phi, const Vec& v, double h);

std::optional<ViabilityResult> viability_probe(const SystemData& s, const MemoryArc& phi, double eps,
                                               int levels = 21);

// both conditions of the tangent-cone definition for a given pair
bool tangent_conditions_hold(const SystemData& s, const MemoryArc& phi, const Vec& v, double h,
                             double eps);

struct RegularityReport {
    double max_member_gap = 0.0;  // max_i dist(y_i, hull F(phi_i))
    double limit_gap = 0.0;       // dist(y, hull F(phi)) at the limit
    double bound = 0.0;           // max |y| over the sequence
    bool flow_set_closed = true;
    bool jump_set_closed = true;
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

// seq holds (phi_i, y_i) with the limit pair last
RegularityReport regularity_probe(const SystemData& s, const std::vector<std::pair<MemoryArc, Vec>>& seq,
                                  double tol = 1e-6);

}  // namespace hmk
