#include "hmk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "hmk/metrics.hpp"
#include "hmk/rng.hpp"

namespace hmk {

const char* status_name(Status s)
{
    switch (s) {
    case Status::Complete: return "Complete";
    case Status::BlowUp: return "BlowUp";
    case Status::StuckOutsideCD: return "StuckOutsideCD";
    case Status::JumpCapReached: return "JumpCapReached";
    }
    return "Unknown";
}

namespace {

class Run {
public:
    Run(const SystemData& s, HybridArc arc, const SolveOptions& opt) : s_(s), opt_(opt), arc_(std::move(arc)), rng_(opt.seed)
    {
        arc_.delta = s.delta;
    }

    Solution go()
    {
        {
            MemoryArc phi0 = view_at(0.0);
            bool c = in_flow(s_, phi0, opt_.margin_tol), d = in_jump(s_, phi0, opt_.margin_tol);
            if (!c && !d) throw Error(Errc::InitialDataNotInCD, "initial memory arc outside C and D");
        }
        Solution sol;
        for (;;) {
            if (t_ >= opt_.T - 1e-12) {
                sol.status = Status::Complete;
                break;
            }
            MemoryArc phi = view_at(0.0);
            const bool inC = in_flow(s_, phi, opt_.margin_tol);
            const bool inD = in_jump(s_, phi, opt_.margin_tol);
            if (!inC && !inD) {
                sol.status = Status::StuckOutsideCD;
                sol.note = "outside C and D";
                break;
            }
            const bool jump_now = inD && (opt_.priority == Priority::JumpFirst || !inC);
            if (jump_now) {
                if (j_ + 1 > opt_.J) {
                    sol.status = Status::JumpCapReached;
                    break;
                }
                if (jump(phi, sol)) {
                    if (blown_up()) {
                        sol.status = Status::BlowUp;
                        break;
                    }
                    continue;
                }
            }
            if (inC) {
                Step r = flow(phi);
                if (r == Step::Moved) {
                    if (blown_up()) {
                        sol.status = Status::BlowUp;
                        break;
                    }
                    continue;
                }
                note_ = r == Step::EmptyMap ? "flow map empty" : "cannot flow";
            }
            if (inD && !jump_now) {
                if (j_ + 1 > opt_.J) {
                    sol.status = Status::JumpCapReached;
                    break;
                }
                if (jump(phi, sol)) {
                    if (blown_up()) {
                        sol.status = Status::BlowUp;
                        break;
                    }
                    continue;
                }
            }
            sol.status = Status::StuckOutsideCD;
            sol.note = note_.empty() ? "no continuation" : note_;
            break;
        }
        sol.arc = std::move(arc_);
        sol.t_end = t_;
        sol.j_end = j_;
        return sol;
    }

private:
    enum class Step { Moved, EmptyMap, NotViable };

    Segment& seg() { return arc_.seg(j_); }

    // memory view at (t + dtheta, j); the sample there must already exist
    MemoryArc view_at(double dtheta) { return memory_view(arc_, t_ + dtheta, j_, s_.delta); }

    size_t pick(size_t n, double u) const
    {
        if (opt_.selector == Selector::First) return 0;
        return std::min(n - 1, static_cast<size_t>(u * static_cast<double>(n)));
    }

    template <class F>
    auto with_sample(double dtheta, const Vec& x, F&& f)
    {
        seg().t.push_back(t_ + dtheta);
        seg().x.push_back(x);
        struct Pop {
            Segment& s;
            ~Pop()
            {
                s.t.pop_back();
                s.x.pop_back();
            }
        } pop{seg()};
        return f(view_at(dtheta));
    }

    std::optional<Vec> stage(double dtheta, const Vec& x, double u)
    {
        auto verts = with_sample(dtheta, x, [&](const MemoryArc& phi) { return s_.flow_map(phi); });
        if (verts.empty()) return std::nullopt;
        return verts[pick(verts.size(), u)];
    }

    std::optional<Vec> propose(const Vec& k1, double theta, double u)
    {
        const Vec x = seg().x.back();
        auto axpy = [](const Vec& a, double w, const Vec& b) {
            Vec o(a.size());
            for (size_t c = 0; c < a.size(); ++c) o[c] = a[c] + w * b[c];
            return o;
        };
        if (opt_.integrator == Integrator::Euler) return axpy(x, theta, k1);
        auto k2 = stage(0.5 * theta, axpy(x, 0.5 * theta, k1), u);
        if (!k2) return std::nullopt;
        auto k3 = stage(0.5 * theta, axpy(x, 0.5 * theta, *k2), u);
        if (!k3) return std::nullopt;
        auto k4 = stage(theta, axpy(x, theta, *k3), u);
        if (!k4) return std::nullopt;
        Vec o(x.size());
        for (size_t c = 0; c < x.size(); ++c)
            o[c] = x[c] + theta / 6.0 * (k1[c] + 2.0 * (*k2)[c] + 2.0 * (*k3)[c] + (*k4)[c]);
        return o;
    }

    struct Where {
        bool inC, inD;
    };

    Where where(double dtheta, const Vec& x)
    {
        return with_sample(dtheta, x, [&](const MemoryArc& phi) {
            return Where{in_flow(s_, phi, opt_.margin_tol), in_jump(s_, phi, opt_.margin_tol)};
        });
    }

    bool clean(const Where& w) const
    {
        return w.inC && !(opt_.priority == Priority::JumpFirst && w.inD);
    }

    void advance(double theta, double t_new, const Vec& x)
    {
        (void)theta;
        seg().t.push_back(t_new);
        seg().x.push_back(x);
        t_ = t_new;
    }

    Step flow(const MemoryArc& phi)
    {
        auto verts = s_.flow_map(phi);
        double u = rng_.uniform();
        if (verts.empty()) return Step::EmptyMap;
        const Vec k1 = verts[pick(verts.size(), u)];
        const double remaining = opt_.T - t_;
        const double step = std::min(opt_.h, remaining);
        auto end_time = [&](double theta) { return theta == remaining ? opt_.T : t_ + theta; };

        auto xe = propose(k1, step, u);
        if (xe && clean(where(step, *xe))) {
            advance(step, end_time(step), *xe);
            return Step::Moved;
        }
        double lo = 0.0, hi = step;
        std::optional<Vec> x_lo, x_hi = xe;
        while (hi - lo > opt_.event_tol) {
            double mid = 0.5 * (lo + hi);
            if (!(t_ + mid > t_)) break;
            auto xm = propose(k1, mid, u);
            if (xm && clean(where(mid, *xm))) {
                lo = mid;
                x_lo = xm;
            } else {
                hi = mid;
                x_hi = xm;
            }
        }
        if (x_hi && hi >= opt_.event_tol && t_ + hi > t_) {
            Where w = where(hi, *x_hi);
            if (w.inC || w.inD) {
                advance(hi, end_time(hi), *x_hi);
                return Step::Moved;
            }
        }
        if (x_lo && lo >= opt_.event_tol && t_ + lo > t_) {
            advance(lo, end_time(lo), *x_lo);
            return Step::Moved;
        }
        return xe ? Step::NotViable : Step::EmptyMap;
    }

    bool jump(const MemoryArc& phi, Solution& sol)
    {
        auto verts = s_.jump_map(phi);
        double u = rng_.uniform();
        if (verts.empty()) return false;
        const Vec g = verts[pick(verts.size(), u)];
        sol.jumps.push_back({t_, j_, seg().x.back(), g});
        Segment next;
        next.j = j_ + 1;
        next.t = {t_};
        next.x = {g};
        arc_.segments.push_back(std::move(next));
        ++j_;
        return true;
    }

    bool blown_up()
    {
        const Vec x = seg().x.back();
        for (double v : x)
            if (!std::isfinite(v)) return true;
        return norm(x) > opt_.blowup_threshold;
    }

    const SystemData& s_;
    SolveOptions opt_;
    HybridArc arc_;
    Rng rng_;
    double t_ = 0.0;
    int j_ = 0;
    std::string note_;
};

}  // namespace

Solution solve(const SystemData& s, const HybridArc& history, const SolveOptions& opt)
{
    if (!(opt.h > 0.0) || !(opt.blowup_threshold > 0.0) || !(opt.event_tol > 0.0) || opt.J < 0)
        throw Error(Errc::InvalidParam, "bad solver options");
    validate_arc(history);
    if (!history.is_memory()) throw Error(Errc::InvalidArc, "history must end at (0,0)");
    if (history.n != s.n) throw Error(Errc::InvalidParam, "history dimension does not match the system");
    return Run(s, history, opt).go();
}

Solution solve(const SystemData& s, const MemoryArc& phi0, const SolveOptions& opt)
{
    return solve(s, phi0.materialize(), opt);
}

ResidualReport solution_residuals(const SystemData& s, const Solution& sol, double margin_tol)
{
    ResidualReport r;
    try {
        validate_arc(sol.arc);
        (void)sol.arc.domain();
    } catch (const Error&) {
        r.domain_valid = false;
        return r;
    }
    const HybridArc& arc = sol.arc;
    for (const auto& seg : arc.segments) {
        if (seg.j < 0) continue;
        for (size_t i = 0; i + 1 < seg.t.size(); ++i) {
            if (seg.t[i] < -tau_eq) continue;
            double dt = seg.t[i + 1] - seg.t[i];
            Vec q(seg.x[i].size());
            for (size_t c = 0; c < q.size(); ++c) q[c] = (seg.x[i + 1][c] - seg.x[i][c]) / dt;
            // the quotient averages x' over the step, so compare it with the
            // hull of F at both ends; a delayed lookup may switch branches inside
            auto verts = s.flow_map(memory_view(arc, seg.t[i], seg.j, s.delta));
            if (!verts.empty()) {
                auto right = s.flow_map(memory_view(arc, seg.t[i + 1], seg.j, s.delta));
                verts.insert(verts.end(), right.begin(), right.end());
            }
            double gap = verts.empty() ? std::numeric_limits<double>::infinity() : hull_distance(q, verts);
            r.flow_residual = std::max(r.flow_residual, gap);
            ++r.flow_samples;
        }
    }
    for (const auto& jr : sol.jumps) {
        ++r.jumps;
        MemoryArc phi = memory_view(arc, jr.t, jr.j, s.delta);
        if (!in_jump(s, phi, margin_tol)) r.jumps_in_D = false;
        auto verts = s.jump_map(phi);
        if (std::find(verts.begin(), verts.end(), jr.post) == verts.end()) r.jumps_exact = false;
        if (!arc.has_segment(jr.j + 1) || arc.seg(jr.j + 1).x.front() != jr.post) r.jumps_exact = false;
    }
    return r;
}

EulerApprox euler_approximation(const SystemData& s, const HybridArc& history, double eps, double T0, double a)
{
    if (!(eps > 0.0 && eps < 1.0)) throw Error(Errc::InvalidParam, "eps must lie in (0,1)");
    if (!(a > 0.0) || !(T0 > 0.0)) throw Error(Errc::InvalidParam, "a and T0 must be > 0");
    validate_arc(history);
    EulerApprox out;
    out.arc = history;
    out.arc.delta = s.delta;
    HybridArc& arc = out.arc;
    {
        MemoryArc phi0 = memory_view(arc, 0.0, 0, s.delta);
        if (!in_flow(s, phi0) || in_jump(s, phi0)) throw Error(Errc::NotInFlowSet, "phi0 must lie in C minus D");
        double vmax = 0.0;
        for (const auto& v : s.flow_map(phi0)) vmax = std::max(vmax, norm(v));
        out.lambda = 1.0 + vmax;
    }
    out.budget = a / (out.lambda + (1.0 + out.lambda) * eps);
    const double stop = std::min(out.budget, T0);
    double t = 0.0;
    while (t < stop - 1e-12) {
        MemoryArc phi = memory_view(arc, t, 0, s.delta);
        if (in_jump(s, phi)) {
            out.hit_jump_set = true;
            break;
        }
        auto r = viability_probe(s, phi, eps);
        if (!r) throw Error(Errc::ViabilityFailed, "no tangent direction found");
        double h = std::min(r->h, stop - t);
        Vec x = arc.seg(0).x.back();
        for (size_t c = 0; c < x.size(); ++c) x[c] += h * r->v[c];
        double tn = h == stop - t ? stop : t + h;
        arc.seg(0).t.push_back(tn);
        arc.seg(0).x.push_back(x);
        t = tn;
        ++out.steps;
    }
    return out;
}

double overlap_sup_distance(const HybridArc& x, const HybridArc& y)
{
    double best = 0.0;
    int lo_j = std::max(x.j_min(), y.j_min()), hi_j = std::min(x.j_max(), y.j_max());
    for (int j = lo_j; j <= hi_j; ++j) {
        const Segment& a = x.seg(j);
        const Segment& b = y.seg(j);
        double lo = std::max(a.t0(), b.t0()), hi = std::min(a.t1(), b.t1());
        if (lo > hi) continue;
        std::vector<double> times{lo, hi};
        for (double t : a.t)
            if (t >= lo && t <= hi) times.push_back(t);
        for (double t : b.t)
            if (t >= lo && t <= hi) times.push_back(t);
        for (double t : times) best = std::max(best, distance(a.eval(t), b.eval(t)));
    }
    return best;
}

namespace {

double fit_order(const std::vector<double>& steps, const std::vector<double>& gaps)
{
    if (gaps.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(gaps.size());
    for (size_t i = 0; i < gaps.size(); ++i) {
        double lx = std::log(steps[i]), ly = std::log(gaps[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

// largest gap at forward sample times present in both arcs
double node_gap(const HybridArc& a, const HybridArc& b)
{
    double g = 0.0;
    bool any = false;
    for (const auto& sa : a.segments) {
        if (sa.j < 0 || !b.has_segment(sa.j)) continue;
        const Segment& sb = b.seg(sa.j);
        for (size_t i = 0; i < sa.t.size(); ++i) {
            if (sa.t[i] < 0.0) continue;
            auto it = std::lower_bound(sb.t.begin(), sb.t.end(), sa.t[i] - 1e-9);
            if (it == sb.t.end() || std::abs(*it - sa.t[i]) > 1e-9) continue;
            g = std::max(g, distance(sa.x[i], sb.x[static_cast<size_t>(it - sb.t.begin())]));
            any = true;
        }
    }
    return any ? g : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

RefineReport refine_study(const SystemData& s, const HybridArc& history, const std::vector<double>& steps,
                          SolveOptions opt)
{
    for (size_t i = 1; i < steps.size(); ++i)
        if (!(steps[i] < steps[i - 1])) throw Error(Errc::InvalidParam, "steps must be decreasing");
    RefineReport r;
    r.steps = steps;
    std::vector<Solution> sols;
    for (double h : steps) {
        opt.h = h;
        sols.push_back(solve(s, history, opt));
        r.statuses.push_back(sols.back().status);
    }
    for (size_t i = 0; i + 1 < sols.size(); ++i) {
        r.uniform.push_back(overlap_sup_distance(sols[i].arc, sols[i + 1].arc));
        r.graphical.push_back(integrated_distance(sols[i].arc, sols[i + 1].arc).d);
        r.node.push_back(node_gap(sols[i].arc, sols[i + 1].arc));
    }
    for (size_t i = 0; i + 1 < r.uniform.size(); ++i)
        r.ratios.push_back(std::log(r.uniform[i] / r.uniform[i + 1]) / std::log(steps[i] / steps[i + 1]));
    r.order = fit_order(steps, r.uniform);
    r.node_order = fit_order(steps, r.node);
    return r;
}

namespace {

// graph points at multiples of g plus segment ends
GraphCloud grid_cloud(const HybridArc& a, double g)
{
    GraphCloud c;
    c.dim = a.n + 2;
    std::vector<double> p(static_cast<size_t>(c.dim));
    auto push = [&](double t, int j, const Vec& x) {
        p[0] = t;
        p[1] = j;
        std::copy(x.begin(), x.end(), p.begin() + 2);
        c.add(p.data());
    };
    for (const auto& s : a.segments) {
        push(s.t0(), s.j, s.x.front());
        for (double k = std::floor(s.t0() / g) + 1.0; k * g < s.t1(); k += 1.0) push(k * g, s.j, s.eval(k * g));
        if (s.t1() > s.t0()) push(s.t1(), s.j, s.x.back());
    }
    return c;
}

}  // namespace

ContinuityReport continuity_check(const HybridArc& arc, int j, double delta, int base_points)
{
    if (!arc.has_segment(j) || j < 0) throw Error(Errc::EmptyInterior, "no such jump index");
    const Segment& sj = arc.seg(j);
    const double a = std::max(0.0, sj.t0()), b = sj.t1();
    if (!(b - a > tau_eq)) throw Error(Errc::EmptyInterior, "interval has empty interior");
    ContinuityReport r;
    for (const auto& s : arc.segments) {
        if (s.j > j) continue;
        for (double tb : {s.t0(), s.t1()}) {
            double ts = tb + (s.j - j) + delta + 1.0;
            if (ts > a && ts < b &&
                std::none_of(r.exceptional.begin(), r.exceptional.end(),
                             [&](double e) { return std::abs(e - ts) <= tau_eq; }))
                r.exceptional.push_back(ts);
        }
    }
    std::sort(r.exceptional.begin(), r.exceptional.end());
    const double dt0 = (b - a) / 8.0;
    const double guard = 1e-6;
    const int M = std::max(base_points, 2);
    // shared grid so that sampling does not move with the window
    const double grid = dt0 / 32.0;
    QuadratureSpec quad;
    quad.h_rho = 0.05;
    for (int level = 0; level < 4; ++level) {
        double dt = dt0 / std::pow(2.0, level);
        double worst = 0.0;
        for (int m = 0; m < M; ++m) {
            double t0 = a + (b - a - dt0) * m / (M - 1);
            double t1 = t0 + dt;
            bool hits = std::any_of(r.exceptional.begin(), r.exceptional.end(),
                                    [&](double e) { return e >= t0 - guard && e <= t1 + guard; });
            if (hits) continue;
            GraphCloud A = grid_cloud(memory_view(arc, t0, j, delta).materialize(), grid);
            GraphCloud B = grid_cloud(memory_view(arc, t1, j, delta).materialize(), grid);
            worst = std::max(worst, integrated_distance(A, B, quad).d);
        }
        r.increments.emplace_back(dt, worst);
    }
    bool monotone = true;
    for (size_t i = 1; i < r.increments.size(); ++i)
        if (r.increments[i].second > r.increments[i - 1].second + 1e-9) monotone = false;
    const double first = r.increments.front().second, last = r.increments.back().second;
    r.pass = monotone && (last <= 0.5 * first + 1e-12);
    return r;
}

}  // namespace hmk
