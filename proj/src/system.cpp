#include "hmk/system.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "hmk/metrics.hpp"
#include "hmk/rng.hpp"

namespace hmk {

bool in_flow(const SystemData& s, const MemoryArc& phi, double tol) { return s.flow_margin(phi) <= tol; }
bool in_jump(const SystemData& s, const MemoryArc& phi, double tol) { return s.jump_margin(phi) <= tol; }

Radius constant_radius(double r)
{
    return [r](const MemoryArc&) { return r; };
}

namespace {

struct PerturbTables {
    std::vector<double> sigma;     // in [-1, 1]
    std::vector<Vec> offset;       // in the unit ball
    std::vector<Vec> dirs;         // unit vectors, +/- pairs
};

void push_unique(std::vector<Vec>& out, Vec v)
{
    for (const auto& w : out)
        if (w == v) return;
    out.push_back(std::move(v));
}

// the sampled part of the ball around phi that lies in the set; when no
// sample does, the one with the smallest margin stands in
std::vector<MemoryArc> ball_in_set(const MemoryArc& phi, double r, const PerturbTables& tab, const Margin& m)
{
    std::vector<MemoryArc> cand{phi};
    for (size_t i = 0; i < tab.sigma.size(); ++i) {
        Vec off = tab.offset[i];
        for (auto& c : off) c *= r;
        cand.push_back(phi.perturbed(tab.sigma[i] * r, off));
    }
    std::vector<MemoryArc> in;
    double best = std::numeric_limits<double>::infinity();
    size_t best_i = 0;
    for (size_t i = 0; i < cand.size(); ++i) {
        double v = m(cand[i]);
        if (v <= 0.0) in.push_back(cand[i]);
        if (v < best) {
            best = v;
            best_i = i;
        }
    }
    if (in.empty()) in.push_back(cand[best_i]);
    return in;
}

MemoryArc trimmed_after_jump(const MemoryArc& phi, const Vec& g)
{
    auto arc = std::make_shared<const HybridArc>(append_jump(phi, g).materialize());
    try {
        return MemoryArc::view(arc, 0.0, 0, phi.delta());
    } catch (const Error&) {
        return append_jump(phi, g);
    }
}

}  // namespace

PerturbedSystem perturb(const SystemData& s, Radius rho, double scale, const PerturbOptions& opt)
{
    if (!(scale >= 0.0 && scale <= 1.0)) throw Error(Errc::InvalidScale, "perturbation scale must lie in [0,1]");
    if (opt.samples < 0 || opt.directions < 0) throw Error(Errc::InvalidParam, "negative sample counts");

    auto tab = std::make_shared<PerturbTables>();
    Rng rng(opt.seed);
    for (int i = 0; i < opt.samples; ++i) {
        tab->sigma.push_back(rng.uniform(-1.0, 1.0));
        tab->offset.push_back(rng.in_ball(s.n));
    }
    for (int i = 0; i < (opt.directions + 1) / 2; ++i) {
        Vec d = rng.unit_vector(s.n);
        Vec m = d;
        for (auto& c : m) c = -c;
        tab->dirs.push_back(d);
        tab->dirs.push_back(m);
    }

    PerturbedSystem p;
    p.base = s;
    p.rho = rho;
    p.scale = scale;
    p.data = s;
    p.data.name = s.name + "+perturbed";

    const SystemData base = s;
    p.data.flow_margin = [base, rho, scale](const MemoryArc& phi) {
        return base.flow_margin(phi) - base.gain_C * scale * rho(phi);
    };
    p.data.jump_margin = [base, rho, scale](const MemoryArc& phi) {
        return base.jump_margin(phi) - base.gain_D * scale * rho(phi);
    };
    p.data.flow_map = [base, rho, scale, tab](const MemoryArc& phi) {
        double r = scale * rho(phi);
        if (r == 0.0) return base.flow_map(phi);
        std::vector<Vec> out;
        for (const auto& psi : ball_in_set(phi, r, *tab, base.flow_margin)) {
            for (const auto& v : base.flow_map(psi)) {
                push_unique(out, v);
                for (const auto& d : tab->dirs) {
                    Vec w = v;
                    for (size_t c = 0; c < w.size(); ++c) w[c] += r * d[c];
                    push_unique(out, w);
                }
            }
        }
        return out;
    };
    p.data.jump_map = [base, rho, scale, tab](const MemoryArc& phi) {
        double r = scale * rho(phi);
        if (r == 0.0) return base.jump_map(phi);
        std::vector<Vec> out;
        for (const auto& psi : ball_in_set(phi, r, *tab, base.jump_margin)) {
            for (const auto& g : base.jump_map(psi)) {
                double rg = scale * rho(trimmed_after_jump(phi, g));
                push_unique(out, g);
                if (rg == 0.0) continue;
                for (const auto& d : tab->dirs) {
                    Vec w = g;
                    for (size_t c = 0; c < w.size(); ++c) w[c] += rg * d[c];
                    push_unique(out, w);
                }
            }
        }
        return out;
    };
    return p;
}

MemoryArc extend_linear(const MemoryArc& phi, const Vec& v, double h)
{
    HybridArc a = phi.materialize();
    Segment& top = a.seg(0);
    Vec x0 = phi.top();
    Vec x1 = x0;
    for (size_t c = 0; c < x1.size(); ++c) x1[c] += h * v[c];
    top.t.push_back(h);
    top.x.push_back(x1);
    auto arc = std::make_shared<const HybridArc>(std::move(a));
    return MemoryArc::view(arc, h, 0, phi.delta());
}

bool tangent_conditions_hold(const SystemData& s, const MemoryArc& phi, const Vec& v, double h, double eps)
{
    if (!(h > 0.0) || h > eps) return false;
    MemoryArc psi = extend_linear(phi, v, h);
    const Vec x0 = phi.top();
    if (distance(psi.eval(-h, 0), x0) > tau_eq) return false;
    for (double frac : {1.0, 0.5, 0.25}) {
        double sh = frac * h;
        Vec xs = psi.eval(sh - h, 0);
        Vec q(xs.size());
        for (size_t c = 0; c < q.size(); ++c) q[c] = (xs[c] - x0[c]) / sh;
        if (distance(q, v) > eps) return false;
    }
    return in_flow(s, psi);
}

std::optional<ViabilityResult> viability_probe(const SystemData& s, const MemoryArc& phi, double eps, int levels)
{
    if (!(eps > 0.0)) throw Error(Errc::InvalidParam, "eps must be > 0");
    if (!in_flow(s, phi) || in_jump(s, phi)) throw Error(Errc::NotInFlowSet, "probe needs phi in C minus D");
    for (const auto& v : s.flow_map(phi)) {
        double h = eps;
        for (int i = 0; i < levels; ++i, h *= 0.5) {
            MemoryArc psi = extend_linear(phi, v, h);
            if (in_flow(s, psi)) return ViabilityResult{v, h, psi};
        }
    }
    return std::nullopt;
}

RegularityReport regularity_probe(const SystemData& s, const std::vector<std::pair<MemoryArc, Vec>>& seq,
                                  double tol)
{
    RegularityReport r;
    if (seq.empty()) return r;
    const size_t last = seq.size() - 1;
    for (size_t i = 0; i < seq.size(); ++i) {
        const auto& [phi, y] = seq[i];
        r.bound = std::max(r.bound, norm(y));
        auto verts = s.flow_map(phi);
        double gap = verts.empty() ? std::numeric_limits<double>::infinity() : hull_distance(y, verts);
        if (i < last)
            r.max_member_gap = std::max(r.max_member_gap, gap);
        else
            r.limit_gap = gap;
    }
    if (r.max_member_gap > tol) r.violations.push_back("y_i outside hull F(phi_i)");
    if (r.limit_gap > tol) r.violations.push_back("limit value outside hull F(limit)");
    if (!std::isfinite(r.bound)) r.violations.push_back("F unbounded along the sequence");

    if (last > 0) {
        bool tail_C = true, tail_D = true;
        for (size_t i = last / 2; i < last; ++i) {
            tail_C = tail_C && in_flow(s, seq[i].first);
            tail_D = tail_D && in_jump(s, seq[i].first);
        }
        if (tail_C && !in_flow(s, seq[last].first, tol)) {
            r.flow_set_closed = false;
            r.violations.push_back("flow set not closed along the sequence");
        }
        if (tail_D && !in_jump(s, seq[last].first, tol)) {
            r.jump_set_closed = false;
            r.violations.push_back("jump set not closed along the sequence");
        }
    }
    return r;
}

}  // namespace hmk
