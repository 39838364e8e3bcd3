#include "hmk/analysis.hpp"

#include <algorithm>
#include <limits>

#include "hmk/metrics.hpp"

namespace hmk {

double window_max(const Solution& sol, double m)
{
    double best = 0.0;
    for (const auto& s : sol.arc.segments) {
        if (s.j < 0) continue;
        for (size_t i = 0; i < s.t.size(); ++i) {
            if (s.t[i] < -tau_eq || s.t[i] + s.j >= m) continue;
            double v = norm(s.x[i]);
            if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
            best = std::max(best, v);
        }
    }
    return best;
}

bool locally_eventually_bounded(const std::vector<Solution>& seq, double m, double growth_tol, double reference)
{
    if (seq.empty()) return false;
    std::vector<double> M;
    for (const auto& s : seq) M.push_back(window_max(s, m));
    const size_t half = M.size() / 2;
    if (half == 0) return std::isfinite(M.front());
    double tail = *std::max_element(M.begin() + static_cast<std::ptrdiff_t>(half), M.end());
    if (!std::isfinite(tail)) return false;
    for (size_t N = 0; N < half; ++N) {
        double head = std::max(reference, *std::max_element(M.begin() + static_cast<std::ptrdiff_t>(N),
                                                            M.begin() + static_cast<std::ptrdiff_t>(half)));
        if (std::isfinite(head) && tail <= (1.0 + growth_tol) * head + 1e-12) return true;
    }
    return false;
}

Target Target::point_set(std::vector<Vec> pts)
{
    Target t;
    t.kind = Kind::Points;
    t.points = std::move(pts);
    return t;
}

Target Target::box(Vec lo, Vec hi)
{
    if (lo.size() != hi.size()) throw Error(Errc::InvalidParam, "box bounds differ in size");
    for (size_t c = 0; c < lo.size(); ++c)
        if (!(lo[c] <= hi[c])) throw Error(Errc::EmptyTarget, "empty box");
    Target t;
    t.kind = Kind::Box;
    t.lo = std::move(lo);
    t.hi = std::move(hi);
    return t;
}

Target origin_target(const SystemData& s)
{
    Vec lo(static_cast<size_t>(s.n), 0.0), hi(static_cast<size_t>(s.n), 0.0);
    for (const auto& c : s.clocks) {
        lo[static_cast<size_t>(c.index)] = c.lo;
        hi[static_cast<size_t>(c.index)] = c.hi;
    }
    return Target::box(lo, hi);
}

double dist_to_set(const Vec& x, const Target& W)
{
    if (W.kind == Target::Kind::Box) {
        if (W.lo.empty()) throw Error(Errc::EmptyTarget, "empty target");
        if (W.lo.size() != x.size()) throw Error(Errc::InvalidParam, "dimension mismatch");
        double s = 0.0;
        for (size_t c = 0; c < x.size(); ++c) {
            double d = x[c] < W.lo[c] ? W.lo[c] - x[c] : (x[c] > W.hi[c] ? x[c] - W.hi[c] : 0.0);
            s += d * d;
        }
        return std::sqrt(s);
    }
    if (W.points.empty()) throw Error(Errc::EmptyTarget, "empty target");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : W.points) {
        if (p.size() != x.size()) throw Error(Errc::InvalidParam, "dimension mismatch");
        best = std::min(best, distance(x, p));
    }
    return best;
}

void validate_kl(const KLBound& b)
{
    if (!(b.C >= 1.0) || !(b.mu > 0.0) || !(b.eps >= 0.0))
        throw Error(Errc::InvalidParam, "need C >= 1, mu > 0, eps >= 0");
}

KLReport check_kl(const Solution& sol, const Target& W, const KLBound& b)
{
    validate_kl(b);
    KLReport r;
    const double delta = sol.arc.delta.value_or(0.0);
    HybridArc init = memory_view(sol.arc, 0.0, 0, delta).materialize();
    for (const auto& s : init.segments)
        for (const auto& x : s.x) r.r0 = std::max(r.r0, dist_to_set(x, W));
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& s : sol.arc.segments) {
        if (s.j < 0) continue;
        for (size_t i = 0; i < s.t.size(); ++i) {
            if (s.t[i] < -tau_eq) continue;
            double lhs = dist_to_set(s.x[i], W);
            double rhs = b.beta(r.r0, s.t[i] + s.j) + b.eps;
            double m = rhs - lhs;
            ++r.samples;
            r.worst_margin = std::min(r.worst_margin, m);
            if (!(m >= 0.0) && !r.first_violation) {
                r.pass = false;
                r.first_violation = std::make_pair(s.t[i], s.j);
            }
        }
    }
    return r;
}

namespace {

std::vector<std::pair<double, int>> probe_points(const HybridArc& arc)
{
    std::vector<std::pair<double, int>> out;
    for (const auto& s : arc.segments) {
        if (s.j < 0) continue;
        double a = std::max(0.0, s.t0()), b = s.t1();
        if (b - a > 1e-6) out.emplace_back(0.5 * (a + b), s.j);
    }
    return out;
}

bool has_point(const HybridArc& arc, double t, int j)
{
    return arc.has_segment(j) && t >= arc.seg(j).t0() && t <= arc.seg(j).t1();
}

}  // namespace

ConvergenceReport wellposedness_experiment(const SystemData& s, Radius rho, const std::vector<double>& deltas,
                                           const HybridArc& history, const ExperimentOptions& opt)
{
    ConvergenceReport rep;
    rep.deltas = deltas;
    rep.slack = opt.slack;
    Solution nominal = solve(s, history, opt.solve);
    rep.nominal_status = status_name(nominal.status);
    rep.probes = probe_points(nominal.arc);
    const GraphCloud nom_cloud = graph_cloud(nominal.arc);

    std::vector<Solution> runs;
    std::optional<size_t> last_ok;
    for (size_t i = 0; i < deltas.size(); ++i) {
        try {
            PerturbedSystem p = perturb(s, rho, deltas[i], opt.perturb);
            Solution x = solve(p.data, history, opt.solve);
            rep.statuses.push_back(status_name(x.status));
            rep.distances.push_back(integrated_distance(graph_cloud(x.arc), nom_cloud).d);
            std::vector<double> vd;
            for (const auto& [t, j] : rep.probes) {
                if (!has_point(x.arc, t, j)) {
                    vd.push_back(std::numeric_limits<double>::quiet_NaN());
                    continue;
                }
                GraphCloud a = graph_cloud(memory_view(x.arc, t, j, s.delta));
                GraphCloud b = graph_cloud(memory_view(nominal.arc, t, j, s.delta));
                vd.push_back(integrated_distance(a, b).d);
            }
            rep.view_distances.push_back(std::move(vd));
            rep.errors.emplace_back();
            runs.push_back(std::move(x));
            last_ok = runs.size() - 1;
        } catch (const Error& e) {
            rep.statuses.push_back("Error");
            rep.distances.push_back(std::numeric_limits<double>::quiet_NaN());
            rep.view_distances.emplace_back();
            rep.errors.emplace_back(e.what());
        }
    }
    for (size_t i = 1; i < rep.distances.size(); ++i)
        if (!(rep.distances[i] <= rep.distances[i - 1] + opt.slack)) rep.nonincreasing = false;
    if (!runs.empty()) {
        // compare on the hybrid-time window every run reaches
        double m = opt.solve.T + opt.solve.J;
        for (const auto& r : runs) m = std::min(m, r.t_end + r.j_end);
        // the runs should settle near the nominal solution's own bound
        rep.bounded = locally_eventually_bounded(runs, m, 0.1, window_max(nominal, m));
    }

    // residuals of the closest run against the nominal data
    if (last_ok) {
        const Solution& x = runs[*last_ok];
        ResidualReport rr = solution_residuals(s, x, opt.solve.margin_tol);
        rep.limit_flow_residual = rr.flow_residual;
        for (const auto& jr : x.jumps) {
            auto verts = s.jump_map(memory_view(x.arc, jr.t, jr.j, s.delta));
            double gap = verts.empty() ? std::numeric_limits<double>::infinity() : hull_distance(jr.post, verts);
            rep.limit_jump_gap = std::max(rep.limit_jump_gap, gap);
        }
        rep.limit_residual_ok = rr.domain_valid && rep.limit_flow_residual <= opt.residual_tol &&
                                rep.limit_jump_gap <= opt.residual_tol;
    }
    return rep;
}

RobustnessReport robustness_experiment(const SystemData& s, const Target& W, const KLBound& b, Radius rho,
                                       const std::vector<double>& deltas, const std::vector<HybridArc>& histories,
                                       const ExperimentOptions& opt)
{
    validate_kl(b);
    RobustnessReport rep;
    std::vector<double> eps_grid{0.0, 0.5 * b.eps, b.eps, 2.0 * b.eps, b.eps + 1.0};
    auto monotone = [&](const Solution& sol) {
        bool seen_pass = false;
        for (double e : eps_grid) {
            KLBound be = b;
            be.eps = e;
            bool p = check_kl(sol, W, be).pass;
            if (seen_pass && !p) return false;
            seen_pass = seen_pass || p;
        }
        return true;
    };
    for (const auto& h : histories) {
        Solution sol = solve(s, h, opt.solve);
        if (!check_kl(sol, W, b).pass) rep.nominal_pass = false;
    }
    for (double d : deltas) {
        PerturbedSystem p = perturb(s, rho, d, opt.perturb);
        bool all = true;
        for (size_t i = 0; i < histories.size(); ++i) {
            RobustRun run;
            run.delta = d;
            run.history = static_cast<int>(i);
            Solution sol = solve(p.data, histories[i], opt.solve);
            run.status = status_name(sol.status);
            run.kl = check_kl(sol, W, b);
            run.monotone_in_eps = monotone(sol);
            rep.monotone_in_eps = rep.monotone_in_eps && run.monotone_in_eps;
            all = all && run.kl.pass;
            rep.runs.push_back(std::move(run));
        }
        if (all && (!rep.largest_passing_delta || d > *rep.largest_passing_delta)) rep.largest_passing_delta = d;
    }
    return rep;
}

}  // namespace hmk
