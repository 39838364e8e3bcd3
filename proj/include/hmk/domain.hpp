#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hmk/error.hpp"

namespace hmk {

using Vec = std::vector<double>;

// tolerance for breakpoint membership and the s+k = -delta test
inline constexpr double tau_eq = 1e-9;

double norm(const Vec& v);
double distance(const Vec& a, const Vec& b);

struct Interval {
    int j = 0;
    double lo = 0.0;
    double hi = 0.0;
};

// Breakpoint encoding: forward_times t_0=0 <= t_1 <= ... <= t_J gives the
// forward intervals [t_j, t_{j+1}] x {j}, j = 0..J-1; memory_times
// s_0=0 >= s_1 >= ... >= s_K gives [s_k, s_{k-1}] x {-k+1}, k = 1..K.
// An empty union on either side contributes only the origin.
struct HybridTimeDomain {
    std::vector<double> forward_times{0.0};
    std::vector<double> memory_times{0.0};
    int J = 0;
    int K = 0;

    std::vector<Interval> intervals() const;
    bool contains(double t, int j, double tol = tau_eq) const;
};

HybridTimeDomain make_domain(std::vector<double> forward_times, std::vector<double> memory_times);

struct Segment {
    int j = 0;
    std::vector<double> t;
    std::vector<Vec> x;

    double t0() const { return t.front(); }
    double t1() const { return t.back(); }
    Vec eval(double time) const;
};

struct HybridArc {
    int n = 0;
    std::optional<double> delta;
    std::vector<Segment> segments;  // consecutive jump indices, ascending

    int j_min() const { return segments.front().j; }
    int j_max() const { return segments.back().j; }
    bool has_segment(int j) const;
    const Segment& seg(int j) const;
    Segment& seg(int j);
    HybridTimeDomain domain() const;
    bool is_memory() const;
};

void validate_arc(const HybridArc& arc);
Vec arc_eval(const HybridArc& arc, double t, int j);

// constant memory arc on [-length, 0] x {0}
HybridArc constant_history(const Vec& value, double length, int samples = 2);

struct Window {
    int k = 0;
    double lo = 0.0;
    double hi = 0.0;
};

// A hybrid memory arc.  Either owns its samples or is a shifted, trimmed
// window into a larger arc (the memory operator).  A view must not outlive
// the arc it refers to, and that arc must not change while the view is used.
class MemoryArc {
public:
    MemoryArc() = default;

    static MemoryArc view(const HybridArc& arc, double t, int j, double delta);
    static MemoryArc owned(HybridArc arc, double delta);
    // like view, but keeps the arc alive
    static MemoryArc view(std::shared_ptr<const HybridArc> arc, double t, int j, double delta);

    int n() const { return base().n; }
    double delta() const { return delta_; }
    double delta_inf() const { return delta_inf_; }
    double t() const { return t_; }
    int j() const { return j_; }
    const std::vector<Window>& windows() const { return windows_; }

    bool contains(double s, int k, double tol = tau_eq) const;
    Vec eval(double s, int k) const;
    // value at s for the largest k with (s,k) in the domain
    std::optional<Vec> latest(double s) const;
    Vec top() const { return eval(0.0, 0); }

    double min_sk() const;
    double sup_norm() const;

    // copy whose lookups are shifted by sigma in time (clamped to each
    // interval) and offset in value
    MemoryArc perturbed(double sigma, const Vec& offset) const;

    HybridArc materialize() const;

private:
    const HybridArc& base() const { return owned_ ? *owned_ : *ref_; }
    const Window* window(int k) const;

    const HybridArc* ref_ = nullptr;
    std::shared_ptr<const HybridArc> owned_;
    double t_ = 0.0;
    int j_ = 0;
    double delta_ = 0.0;
    double delta_inf_ = 0.0;
    std::vector<Window> windows_;  // windows_[i].k == -i
    double sigma_ = 0.0;
    Vec offset_;
};

MemoryArc memory_view(const HybridArc& arc, double t, int j, double delta);
MemoryArc append_jump(const MemoryArc& phi, const Vec& g);

struct MDeltaCheck {
    bool cond1 = false;  // s+k >= -delta-1 everywhere
    bool cond2 = false;  // some s+k <= -delta
    bool window_ok = false;  // delta <= delta_inf < delta+1
    bool ok() const { return cond1 && cond2 && window_ok; }
};

MDeltaCheck check_mdelta(const MemoryArc& phi);

struct ClassCertificate {
    double sup_norm = 0.0;
    double lipschitz = 0.0;
    bool in_Mb = false;
    bool in_Mblambda = false;
};

ClassCertificate classify(const HybridArc& arc, double b, double lambda);
ClassCertificate classify(const MemoryArc& phi, double b, double lambda);

}  // namespace hmk
