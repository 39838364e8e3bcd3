#include "hmk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hmk {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double sq_dist(const double* a, const double* b, int dim)
{
    double s = 0.0;
    for (int c = 0; c < dim; ++c) {
        double d = a[c] - b[c];
        s += d * d;
    }
    return s;
}

double point_norm(const double* p, int dim)
{
    double s = 0.0;
    for (int c = 0; c < dim; ++c) s += p[c] * p[c];
    return std::sqrt(s);
}

// exact nearest-neighbour distance, implicit kd-tree with median splits
class Nearest {
public:
    explicit Nearest(const GraphCloud& c) : dim_(c.dim)
    {
        const size_t n = c.size();
        if (n == 0) throw Error(Errc::EmptyCloud, "empty cloud");
        std::vector<size_t> order(n);
        std::iota(order.begin(), order.end(), size_t{0});
        axis_.assign(n, 0);
        build(c, order, 0, n);
        pts_.reserve(c.pts.size());
        for (size_t i : order) pts_.insert(pts_.end(), c.point(i), c.point(i) + dim_);
    }

    double dist(const double* z) const
    {
        double best = inf;
        search(z, 0, axis_.size(), best);
        return std::sqrt(best);
    }

private:
    static constexpr size_t leaf = 8;

    void build(const GraphCloud& c, std::vector<size_t>& order, size_t lo, size_t hi)
    {
        if (hi - lo <= leaf) return;
        int axis = 0;
        double spread = -1.0;
        for (int a = 0; a < dim_; ++a) {
            double mn = inf, mx = -inf;
            for (size_t i = lo; i < hi; ++i) {
                mn = std::min(mn, c.point(order[i])[a]);
                mx = std::max(mx, c.point(order[i])[a]);
            }
            if (mx - mn > spread) {
                spread = mx - mn;
                axis = a;
            }
        }
        const size_t mid = lo + (hi - lo) / 2;
        std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(lo), order.begin() + static_cast<std::ptrdiff_t>(mid),
                         order.begin() + static_cast<std::ptrdiff_t>(hi),
                         [&](size_t p, size_t q) { return c.point(p)[axis] < c.point(q)[axis]; });
        axis_[mid] = axis;
        build(c, order, lo, mid);
        build(c, order, mid + 1, hi);
    }

    const double* at(size_t i) const { return pts_.data() + i * static_cast<size_t>(dim_); }

    void search(const double* z, size_t lo, size_t hi, double& best) const
    {
        if (hi - lo <= leaf) {
            for (size_t i = lo; i < hi; ++i) best = std::min(best, sq_dist(at(i), z, dim_));
            return;
        }
        const size_t mid = lo + (hi - lo) / 2;
        const double d = z[axis_[mid]] - at(mid)[axis_[mid]];
        best = std::min(best, sq_dist(at(mid), z, dim_));
        if (d < 0.0) {
            search(z, lo, mid, best);
            if (d * d < best) search(z, mid + 1, hi, best);
        } else {
            search(z, mid + 1, hi, best);
            if (d * d < best) search(z, lo, mid, best);
        }
    }

    int dim_;
    std::vector<int> axis_;
    std::vector<double> pts_;
};

class ProbeEngine {
public:
    ProbeEngine(const GraphCloud& A, const GraphCloud& B, const std::vector<Vec>& probes)
        : dim_(A.dim), na_(A), nb_(B)
    {
        if (B.dim != A.dim) throw Error(Errc::InvalidParam, "cloud dimensions differ");
        struct Item {
            double norm;
            std::vector<double> p;
        };
        std::vector<Item> items;
        auto push = [&](const double* p, bool graph_point) {
            Item it{point_norm(p, dim_), std::vector<double>(p, p + dim_)};
            double v = f(p);
            if (graph_point) hausdorff_ = std::max(hausdorff_, v);
            items.push_back(std::move(it));
        };
        for (size_t i = 0; i < A.size(); ++i) push(A.point(i), true);
        for (size_t i = 0; i < B.size(); ++i) push(B.point(i), true);
        for (const auto& q : probes) {
            if (static_cast<int>(q.size()) != dim_) throw Error(Errc::InvalidParam, "probe dimension mismatch");
            push(q.data(), false);
        }
        std::stable_sort(items.begin(), items.end(),
                         [](const Item& a, const Item& b) { return a.norm < b.norm; });
        double run = 0.0;
        for (const auto& it : items) {
            norms_.push_back(it.norm);
            pts_.insert(pts_.end(), it.p.begin(), it.p.end());
            run = std::max(run, f(it.p.data()));
            prefix_max_.push_back(run);
        }
        std::vector<double> origin(static_cast<size_t>(dim_), 0.0);
        f0_ = f(origin.data());
    }

    double f(const double* z) const { return std::abs(na_.dist(z) - nb_.dist(z)); }

    double value(double rho) const
    {
        double m = f0_;
        size_t inside = static_cast<size_t>(std::upper_bound(norms_.begin(), norms_.end(), rho) - norms_.begin());
        if (inside > 0) m = std::max(m, prefix_max_[inside - 1]);
        if (rho <= 0.0) return m;
        std::vector<double> z(static_cast<size_t>(dim_));
        for (size_t i = inside; i < norms_.size(); ++i) {
            if (m >= hausdorff_) break;
            const double* p = pts_.data() + i * static_cast<size_t>(dim_);
            double s = rho / norms_[i];
            for (int c = 0; c < dim_; ++c) z[static_cast<size_t>(c)] = p[c] * s;
            m = std::max(m, f(z.data()));
        }
        return m;
    }

    double max_norm() const { return norms_.empty() ? 0.0 : norms_.back(); }
    double hausdorff() const { return hausdorff_; }

private:
    int dim_;
    Nearest na_, nb_;
    std::vector<double> norms_;
    std::vector<double> pts_;
    std::vector<double> prefix_max_;
    double f0_ = 0.0;
    double hausdorff_ = 0.0;
};

}  // namespace

GraphCloud graph_cloud(const HybridArc& arc, int refine)
{
    GraphCloud c;
    c.dim = arc.n + 2;
    std::vector<double> p(static_cast<size_t>(c.dim));
    auto push = [&](double t, int j, const Vec& x) {
        p[0] = t;
        p[1] = j;
        std::copy(x.begin(), x.end(), p.begin() + 2);
        c.add(p.data());
    };
    for (const auto& s : arc.segments) {
        for (size_t i = 0; i < s.t.size(); ++i) {
            if (i > 0 && refine > 0) {
                for (int r = 1; r <= refine; ++r) {
                    double w = static_cast<double>(r) / (refine + 1);
                    double t = s.t[i - 1] + w * (s.t[i] - s.t[i - 1]);
                    Vec x(s.x[i].size());
                    for (size_t q = 0; q < x.size(); ++q) x[q] = s.x[i - 1][q] + w * (s.x[i][q] - s.x[i - 1][q]);
                    push(t, s.j, x);
                }
            }
            push(s.t[i], s.j, s.x[i]);
        }
    }
    return c;
}

GraphCloud graph_cloud(const MemoryArc& phi, int refine) { return graph_cloud(phi.materialize(), refine); }

GraphCloud point_cloud(const std::vector<Vec>& points)
{
    GraphCloud c;
    if (points.empty()) return c;
    c.dim = static_cast<int>(points.front().size());
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != c.dim) throw Error(Errc::InvalidParam, "mixed point dimensions");
        c.add(p.data());
    }
    return c;
}

GraphCloud translate(const GraphCloud& c, const Vec& x)
{
    GraphCloud out = c;
    for (size_t i = 0; i < out.size(); ++i)
        for (int q = 0; q < c.dim; ++q) out.pts[i * static_cast<size_t>(c.dim) + static_cast<size_t>(q)] += x[static_cast<size_t>(q)];
    return out;
}

GraphCloud cloud_union(const std::vector<GraphCloud>& parts)
{
    GraphCloud out;
    for (const auto& p : parts) {
        if (p.size() == 0) continue;
        if (out.dim == 0) out.dim = p.dim;
        if (p.dim != out.dim) throw Error(Errc::InvalidParam, "mixed cloud dimensions");
        out.pts.insert(out.pts.end(), p.pts.begin(), p.pts.end());
    }
    return out;
}

double point_to_cloud(const Vec& z, const GraphCloud& H)
{
    if (H.size() == 0) throw Error(Errc::EmptyCloud, "empty cloud");
    if (static_cast<int>(z.size()) != H.dim) throw Error(Errc::InvalidParam, "dimension mismatch");
    double best = inf;
    for (size_t i = 0; i < H.size(); ++i) best = std::min(best, sq_dist(H.point(i), z.data(), H.dim));
    return std::sqrt(best);
}

double hausdorff(const GraphCloud& A, const GraphCloud& B)
{
    Nearest na(A), nb(B);
    double h = 0.0;
    for (size_t i = 0; i < A.size(); ++i) h = std::max(h, nb.dist(A.point(i)));
    for (size_t i = 0; i < B.size(); ++i) h = std::max(h, na.dist(B.point(i)));
    return h;
}

double d_rho(const GraphCloud& A, const GraphCloud& B, double rho, const std::vector<Vec>& probes)
{
    if (!(rho >= 0.0)) throw Error(Errc::NegativeRadius, "rho must be >= 0");
    ProbeEngine e(A, B, probes);
    return e.value(rho);
}

DistanceReport integrated_distance(const GraphCloud& A, const GraphCloud& B, const QuadratureSpec& quad)
{
    if (!(quad.h_rho > 0.0) || !(quad.pad >= 0.0)) throw Error(Errc::InvalidParam, "bad quadrature spec");
    ProbeEngine e(A, B, quad.probes);
    DistanceReport r;
    r.hausdorff = e.hausdorff();
    const double R = e.max_norm();
    r.rho_max = R + quad.pad;
    const double far = e.value(R);
    auto value = [&](double rho) { return rho >= R ? far : e.value(rho); };

    const double h = quad.h_rho;
    const size_t steps = static_cast<size_t>(std::ceil(r.rho_max / h - 1e-12));
    double a = 0.0;
    double va = value(0.0);
    r.d_rho_samples.emplace_back(0.0, va);
    double sum = 0.0;
    for (size_t i = 1; i <= std::max<size_t>(steps, 1); ++i) {
        double b = std::min(static_cast<double>(i) * h, r.rho_max);
        if (b <= a) break;
        double vb = value(b);
        // exact integral of the linear interpolant times e^{-rho}
        double w = b - a;
        double ea = std::exp(-a), eb = std::exp(-b);
        double lin = ea * (-std::expm1(-w) - w * std::exp(-w)) / w;
        sum += va * (ea - eb) + (vb - va) * lin;
        r.d_rho_samples.emplace_back(b, vb);
        a = b;
        va = vb;
    }
    // d_rho is constant beyond the largest probe norm, so the rest is exact
    sum += far * std::exp(-r.rho_max);
    r.d = sum;
    r.tail_bound = r.hausdorff * std::exp(-r.rho_max);
    return r;
}

DistanceReport integrated_distance(const HybridArc& a, const HybridArc& b, const QuadratureSpec& quad)
{
    return integrated_distance(graph_cloud(a), graph_cloud(b), quad);
}

bool same_domain(const HybridArc& phi, const HybridArc& psi, double tol)
{
    if (phi.j_min() != psi.j_min() || phi.j_max() != psi.j_max()) return false;
    for (int j = phi.j_min(); j <= phi.j_max(); ++j) {
        if (std::abs(phi.seg(j).t0() - psi.seg(j).t0()) > tol) return false;
        if (std::abs(phi.seg(j).t1() - psi.seg(j).t1()) > tol) return false;
    }
    return true;
}

double uniform_distance(const HybridArc& phi, const HybridArc& psi, double tol)
{
    if (!same_domain(phi, psi, tol)) throw Error(Errc::DomainMismatch, "arcs have different domains");
    double best = 0.0;
    for (int j = phi.j_min(); j <= phi.j_max(); ++j) {
        const Segment& a = phi.seg(j);
        const Segment& b = psi.seg(j);
        double lo = std::max(a.t0(), b.t0()), hi = std::min(a.t1(), b.t1());
        std::vector<double> times;
        for (double t : a.t) times.push_back(std::clamp(t, lo, std::max(lo, hi)));
        for (double t : b.t) times.push_back(std::clamp(t, lo, std::max(lo, hi)));
        for (double t : times) best = std::max(best, distance(a.eval(t), b.eval(t)));
    }
    return best;
}

namespace {

// min over s in piece k of max(|t - s|, |x - psi(s)|); convex in s, so the
// minimum is at an endpoint, at either term's own minimizer or where they cross
double piece_gap(const Segment& o, size_t k, double t, const Vec& x)
{
    const double L = o.t[k + 1] - o.t[k];
    const Vec& y0 = o.x[k];
    const Vec& y1 = o.x[k + 1];
    double aa = 0.0, ab = 0.0, bb = 0.0;
    for (size_t q = 0; q < x.size(); ++q) {
        double a = y0[q] - x[q], b = y1[q] - y0[q];
        aa += a * a;
        ab += a * b;
        bb += b * b;
    }
    const double c = t - o.t[k];
    auto g = [&](double w) {
        w = std::clamp(w, 0.0, 1.0);
        double e = 0.0;
        for (size_t q = 0; q < x.size(); ++q) {
            double d = y0[q] + w * (y1[q] - y0[q]) - x[q];
            e += d * d;
        }
        return std::max(std::abs(c - w * L), std::sqrt(e));
    };
    double best = std::min(g(0.0), g(1.0));
    if (L > 0.0) best = std::min(best, g(c / L));
    if (bb > 0.0) best = std::min(best, g(-ab / bb));
    const double qa = L * L - bb, qb = -2.0 * (c * L + ab), qc = c * c - aa;
    if (std::abs(qa) > 1e-300) {
        double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            double r = std::sqrt(disc);
            best = std::min({best, g((-qb + r) / (2.0 * qa)), g((-qb - r) / (2.0 * qa))});
        }
    } else if (std::abs(qb) > 1e-300) {
        best = std::min(best, g(-qc / qb));
    }
    return best;
}

// distance in the (time, value) max-norm from (t, x) to the graph of o, with
// the minimizing piece; pieces are scanned outward from the one holding t
std::pair<double, size_t> graph_gap(const Segment& o, double t, const Vec& x)
{
    if (o.t.size() == 1) return {std::max(std::abs(o.t[0] - t), distance(o.x[0], x)), 0};
    size_t m = static_cast<size_t>(std::upper_bound(o.t.begin(), o.t.end(), t) - o.t.begin());
    m = std::clamp<size_t>(m, 1, o.t.size() - 1) - 1;
    double best = inf;
    size_t arg = m;
    for (size_t k = m; k + 1 < o.t.size(); ++k) {
        if (o.t[k] - t >= best) break;
        double g = piece_gap(o, k, t, x);
        if (g < best) best = g, arg = k;
    }
    for (size_t k = m; k-- > 0;) {
        if (t - o.t[k + 1] >= best) break;
        double g = piece_gap(o, k, t, x);
        if (g < best) best = g, arg = k;
    }
    return {best, arg};
}

double gap_to_piece(const Segment& o, size_t k, double t, const Vec& x)
{
    if (o.t.size() == 1) return std::max(std::abs(o.t[0] - t), distance(o.x[0], x));
    return piece_gap(o, k, t, x);
}

// sup of graph_gap along one linear piece of phi on [u, v].  The gap to a
// fixed piece of psi is convex in t, so max(gap_k(u), gap_k(v)) bounds the
// gap on all of [u, v]; branch and bound on that.
double piece_sup(const Segment& p, size_t i, double u, double v, const Segment& o)
{
    auto at = [&](double t) {
        if (p.t.size() == 1) return p.x[0];
        double L = p.t[i + 1] - p.t[i];
        double w = L > 0.0 ? std::clamp((t - p.t[i]) / L, 0.0, 1.0) : 0.0;
        Vec x(p.x[i].size());
        for (size_t c = 0; c < x.size(); ++c) x[c] = p.x[i][c] + w * (p.x[i + 1][c] - p.x[i][c]);
        return x;
    };
    struct Node {
        double u, v;
        double gu, gv;
        size_t ku, kv;
    };
    auto gu = graph_gap(o, u, at(u)), gv = graph_gap(o, v, at(v));
    double best = std::max(gu.first, gv.first);
    std::vector<Node> stack{{u, v, gu.first, gv.first, gu.second, gv.second}};
    while (!stack.empty()) {
        Node n = stack.back();
        stack.pop_back();
        if (n.v - n.u <= 1e-13 * std::max(1.0, std::abs(n.u))) continue;
        const Vec xu = at(n.u), xv = at(n.v);
        double ub = std::max(n.gu, gap_to_piece(o, n.ku, n.v, xv));
        if (n.kv != n.ku) ub = std::min(ub, std::max(gap_to_piece(o, n.kv, n.u, xu), n.gv));
        if (ub <= best + 1e-12) continue;
        double mid = 0.5 * (n.u + n.v);
        auto gm = graph_gap(o, mid, at(mid));
        best = std::max(best, gm.first);
        stack.push_back({n.u, mid, n.gu, gm.first, n.ku, gm.second});
        stack.push_back({mid, n.v, gm.first, n.gv, gm.second, n.kv});
    }
    return best;
}

// sup over (t,j) in dom phi with |t+j| <= tau of the distance to gph psi
double one_sided_tau_eps(const HybridArc& phi, const HybridArc& psi, double tau)
{
    double worst = 0.0;
    for (const auto& s : phi.segments) {
        const double lo = -tau - s.j, hi = tau - s.j;
        if (s.t1() < lo || s.t0() > hi) continue;
        if (!psi.has_segment(s.j)) return inf;
        const Segment& o = psi.seg(s.j);
        if (s.t.size() == 1) {
            worst = std::max(worst, graph_gap(o, s.t[0], s.x[0]).first);
            continue;
        }
        for (size_t i = 0; i + 1 < s.t.size(); ++i) {
            double u = std::max(s.t[i], lo), v = std::min(s.t[i + 1], hi);
            if (u > v) continue;
            worst = std::max(worst, piece_sup(s, i, u, v, o));
        }
    }
    return worst;
}

}  // namespace

double tau_eps_closeness(const HybridArc& phi, const HybridArc& psi, double tau)
{
    if (!(tau >= 0.0)) throw Error(Errc::InvalidParam, "tau must be >= 0");
    return std::max(one_sided_tau_eps(phi, psi, tau), one_sided_tau_eps(psi, phi, tau));
}

double graph_closeness(const GraphCloud& A, const GraphCloud& B, double rho)
{
    if (!(rho >= 0.0)) throw Error(Errc::NegativeRadius, "rho must be >= 0");
    Nearest na(A), nb(B);
    double e = 0.0;
    for (size_t i = 0; i < A.size(); ++i)
        if (point_norm(A.point(i), A.dim) <= rho) e = std::max(e, nb.dist(A.point(i)));
    for (size_t i = 0; i < B.size(); ++i)
        if (point_norm(B.point(i), B.dim) <= rho) e = std::max(e, na.dist(B.point(i)));
    return e;
}

double graph_closeness(const HybridArc& phi, const HybridArc& psi, double rho)
{
    return graph_closeness(graph_cloud(phi), graph_cloud(psi), rho);
}

bool RelationReport::all_pass() const
{
    return std::all_of(items.begin(), items.end(), [](const RelationItem& i) { return i.pass; });
}

namespace {

// both arcs resampled on the union of their sample grids
std::pair<HybridArc, HybridArc> merged_grids(const HybridArc& phi, const HybridArc& psi)
{
    HybridArc a = phi, b = psi;
    for (int j = phi.j_min(); j <= phi.j_max(); ++j) {
        const Segment& sa = phi.seg(j);
        const Segment& sb = psi.seg(j);
        std::vector<double> times = sa.t;
        for (double t : sb.t) times.push_back(std::clamp(t, sa.t0(), sa.t1()));
        std::sort(times.begin(), times.end());
        std::vector<double> uniq;
        for (double t : times)
            if (uniq.empty() || t - uniq.back() > tau_eq) uniq.push_back(t);
        Segment& ra = a.seg(j);
        Segment& rb = b.seg(j);
        ra.t = uniq;
        rb.t = uniq;
        ra.x.clear();
        rb.x.clear();
        for (double t : uniq) {
            ra.x.push_back(sa.eval(t));
            rb.x.push_back(sb.eval(t));
        }
    }
    return {a, b};
}

double max_norm_within(const HybridArc& a, double tau)
{
    double h = 0.0;
    for (const auto& s : a.segments)
        for (size_t i = 0; i < s.t.size(); ++i)
            if (std::abs(s.t[i] + s.j) <= tau + tau_eq) h = std::max(h, norm(s.x[i]));
    return h;
}

}  // namespace

RelationReport relation_check(const HybridArc& phi_in, const HybridArc& psi_in, const RelationOptions& opt)
{
    RelationReport rep;
    const bool same = same_domain(phi_in, psi_in);
    HybridArc phi = phi_in, psi = psi_in;
    if (same) std::tie(phi, psi) = merged_grids(phi_in, psi_in);

    GraphCloud A = graph_cloud(phi), B = graph_cloud(psi);
    const double D = integrated_distance(A, B, opt.quad).d;
    rep.d = D;
    Vec origin(static_cast<size_t>(A.dim), 0.0);
    const double m = std::max(point_to_cloud(origin, A), point_to_cloud(origin, B));
    rep.m = m;
    auto add = [&](const char* name, double param, double lhs, double rhs) {
        rep.items.push_back({name, param, lhs, rhs, lhs <= rhs + opt.slack});
    };

    if (same) add("uniform", 0.0, D, uniform_distance(phi, psi));

    for (double rb : opt.rho_bars) {
        double eps = graph_closeness(A, B, 2.0 * rb + m);
        add("rhoeps", rb, D, eps * (1.0 - std::exp(-rb)) + (rb + m + 1.0) * std::exp(-rb));
    }
    for (double rho : opt.rhos) add("rhoeps_reverse", rho, graph_closeness(A, B, rho), D * std::exp(rho));

    for (double tau : opt.taus) {
        double rb = (tau - m) / 2.0;
        if (rb < 0.0) continue;
        double eps = tau_eps_closeness(phi, psi, tau);
        if (!std::isfinite(eps)) continue;
        add("taueps", tau, D, std::sqrt(2.0) * eps * (1.0 - std::exp(-rb)) + (rb + m + 1.0) * std::exp(-rb));
    }
    double eps_all = tau_eps_closeness(phi, psi, inf);
    if (std::isfinite(eps_all)) add("eps_close", 0.0, D, std::sqrt(2.0) * eps_all);

    for (double tau : opt.taus) {
        double h = std::max(max_norm_within(phi, tau), max_norm_within(psi, tau));
        double rho = std::sqrt(h * h + tau * tau);
        double bound = D * std::exp(rho);
        if (!(bound < 1.0)) continue;
        add("taueps_reverse", tau, tau_eps_closeness(phi, psi, tau), bound);
    }
    return rep;
}

SetLemmaReport set_lemma_check(const std::vector<GraphCloud>& A, const std::vector<GraphCloud>& B,
                               const Vec& x, const Vec& y, double slack)
{
    if (A.size() != B.size() || A.empty()) throw Error(Errc::InvalidParam, "need matching nonempty families");
    SetLemmaReport r;
    GraphCloud UA = cloud_union(A), UB = cloud_union(B);
    // one shared probe set so every d_rho below maximizes over the same points
    QuadratureSpec q;
    GraphCloud all = cloud_union({UA, UB});
    for (size_t i = 0; i < all.size(); ++i) q.probes.emplace_back(all.point(i), all.point(i) + all.dim);
    r.union_lhs = integrated_distance(UA, UB, q).d;
    for (size_t i = 0; i < A.size(); ++i) r.union_rhs += integrated_distance(A[i], B[i], q).d;
    r.union_pass = r.union_lhs <= r.union_rhs + slack;

    GraphCloud TA = translate(UA, x), TB = translate(UB, y);
    r.translation_lhs = integrated_distance(TA, TB).d;
    r.translation_rhs = std::exp(std::min(norm(x), norm(y))) * integrated_distance(UA, UB).d + distance(x, y);
    r.translation_pass = r.translation_lhs <= r.translation_rhs + slack;
    return r;
}

TriangleReport closeness_triangle_check(const HybridArc& phi1, const HybridArc& phi2, const HybridArc& phi3,
                                        double tau1, double tau2)
{
    TriangleReport r;
    r.eps1 = tau_eps_closeness(phi1, phi2, tau1);
    r.eps2 = tau_eps_closeness(phi2, phi3, tau2);
    if (!(tau1 >= r.eps2) || !(tau2 >= r.eps1))
        throw Error(Errc::PreconditionViolated, "need tau1 >= eps2 and tau2 >= eps1");
    r.tau = std::min(tau1 - r.eps2, tau2 - r.eps1);
    r.eps13 = tau_eps_closeness(phi1, phi3, r.tau);
    r.pass = r.eps13 <= r.eps1 + r.eps2 + tau_eq;
    return r;
}

double hull_distance(const Vec& p, const std::vector<Vec>& vertices, double tol)
{
    if (vertices.empty()) return inf;
    size_t best = 0;
    for (size_t i = 1; i < vertices.size(); ++i)
        if (distance(vertices[i], p) < distance(vertices[best], p)) best = i;
    Vec q = vertices[best];
    const size_t n = p.size();
    for (int it = 0; it < 2000; ++it) {
        Vec g(n);
        for (size_t c = 0; c < n; ++c) g[c] = q[c] - p[c];
        size_t s = 0;
        double smin = inf;
        for (size_t i = 0; i < vertices.size(); ++i) {
            double v = 0.0;
            for (size_t c = 0; c < n; ++c) v += g[c] * vertices[i][c];
            if (v < smin) {
                smin = v;
                s = i;
            }
        }
        double gap = 0.0, dd = 0.0;
        Vec d(n);
        for (size_t c = 0; c < n; ++c) {
            d[c] = vertices[s][c] - q[c];
            gap -= g[c] * d[c];
            dd += d[c] * d[c];
        }
        if (gap <= tol || dd == 0.0) break;
        double gamma = std::clamp(gap / dd, 0.0, 1.0);
        for (size_t c = 0; c < n; ++c) q[c] += gamma * d[c];
    }
    return distance(q, p);
}

}  // namespace hmk
