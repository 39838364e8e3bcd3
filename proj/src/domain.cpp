#include "hmk/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hmk {

double norm(const Vec& v)
{
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
}

double distance(const Vec& a, const Vec& b)
{
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<Interval> HybridTimeDomain::intervals() const
{
    std::vector<Interval> out;
    for (int k = K; k >= 1; --k)
        out.push_back({-k + 1, memory_times[static_cast<size_t>(k)],
                       memory_times[static_cast<size_t>(k - 1)]});
    if (K == 0) out.push_back({0, 0.0, 0.0});
    for (int j = 0; j < J; ++j) {
        double a = forward_times[static_cast<size_t>(j)];
        double b = forward_times[static_cast<size_t>(j + 1)];
        if (j == 0)
            out.back().hi = std::max(out.back().hi, b);
        else
            out.push_back({j, a, b});
    }
    return out;
}

bool HybridTimeDomain::contains(double t, int j, double tol) const
{
    for (const auto& iv : intervals())
        if (iv.j == j && t >= iv.lo - tol && t <= iv.hi + tol) return true;
    return false;
}

HybridTimeDomain make_domain(std::vector<double> forward_times, std::vector<double> memory_times)
{
    if (forward_times.empty() || memory_times.empty() || forward_times[0] != 0.0 ||
        memory_times[0] != 0.0)
        throw Error(Errc::MissingOrigin, "breakpoint lists must start at 0");
    for (size_t i = 1; i < forward_times.size(); ++i)
        if (!(forward_times[i] >= forward_times[i - 1]))
            throw Error(Errc::NonMonotoneBreakpoints, "forward times must be nondecreasing");
    for (size_t i = 1; i < memory_times.size(); ++i)
        if (!(memory_times[i] <= memory_times[i - 1]))
            throw Error(Errc::NonMonotoneBreakpoints, "memory times must be nonincreasing");
    HybridTimeDomain d;
    d.J = static_cast<int>(forward_times.size()) - 1;
    d.K = static_cast<int>(memory_times.size()) - 1;
    d.forward_times = std::move(forward_times);
    d.memory_times = std::move(memory_times);
    return d;
}

Vec Segment::eval(double time) const
{
    if (t.size() == 1 || time <= t.front()) return x.front();
    if (time >= t.back()) return x.back();
    auto it = std::upper_bound(t.begin(), t.end(), time);
    size_t i = static_cast<size_t>(it - t.begin());
    double a = t[i - 1], b = t[i];
    double w = (time - a) / (b - a);
    const Vec& xa = x[i - 1];
    const Vec& xb = x[i];
    Vec out(xa.size());
    for (size_t c = 0; c < xa.size(); ++c) out[c] = xa[c] + w * (xb[c] - xa[c]);
    return out;
}

bool HybridArc::has_segment(int j) const
{
    return !segments.empty() && j >= j_min() && j <= j_max();
}

const Segment& HybridArc::seg(int j) const
{
    return segments[static_cast<size_t>(j - j_min())];
}

Segment& HybridArc::seg(int j)
{
    return segments[static_cast<size_t>(j - j_min())];
}

HybridTimeDomain HybridArc::domain() const
{
    std::vector<double> fwd{0.0}, mem{0.0};
    if (j_max() > 0 || seg(0).t1() > tau_eq) {
        for (int j = 0; j <= j_max(); ++j) fwd.push_back(std::max(0.0, seg(j).t1()));
    }
    if (j_min() < 0 || seg(0).t0() < -tau_eq) {
        for (int j = 0; j >= j_min(); --j) mem.push_back(std::min(0.0, seg(j).t0()));
    }
    return make_domain(std::move(fwd), std::move(mem));
}

bool HybridArc::is_memory() const
{
    return j_max() == 0 && std::abs(seg(0).t1()) <= tau_eq;
}

void validate_arc(const HybridArc& arc)
{
    auto fail = [](const std::string& m) { throw Error(Errc::InvalidArc, m); };
    if (arc.n <= 0) fail("state dimension must be positive");
    if (arc.segments.empty()) fail("no segments");
    if (arc.j_min() > 0 || arc.j_max() < 0) fail("jump index 0 missing");
    for (size_t i = 0; i < arc.segments.size(); ++i) {
        const Segment& s = arc.segments[i];
        if (s.j != arc.j_min() + static_cast<int>(i)) fail("jump indices not consecutive");
        if (s.t.empty() || s.t.size() != s.x.size()) fail("bad sample count");
        for (size_t q = 0; q < s.t.size(); ++q) {
            if (!std::isfinite(s.t[q])) fail("non-finite time");
            if (q > 0 && !(s.t[q] > s.t[q - 1])) fail("sample times not increasing");
            if (static_cast<int>(s.x[q].size()) != arc.n) fail("value dimension mismatch");
            for (double v : s.x[q])
                if (!std::isfinite(v)) fail("non-finite value");
        }
        if (s.j < 0 && s.t1() > tau_eq) fail("memory segment with positive time");
        if (s.j > 0 && s.t0() < -tau_eq) fail("forward segment with negative time");
        if (s.j == 0 && (s.t0() > tau_eq || s.t1() < -tau_eq)) fail("segment 0 misses the origin");
        if (i > 0 && std::abs(arc.segments[i - 1].t1() - s.t0()) > tau_eq)
            fail("segments do not meet at jump times");
    }
}

Vec arc_eval(const HybridArc& arc, double t, int j)
{
    if (!arc.has_segment(j)) throw Error(Errc::OutOfDomain, "jump index outside arc");
    const Segment& s = arc.seg(j);
    if (t < s.t0() - tau_eq || t > s.t1() + tau_eq)
        throw Error(Errc::OutOfDomain, "time outside segment");
    return s.eval(t);
}

HybridArc constant_history(const Vec& value, double length, int samples)
{
    HybridArc a;
    a.n = static_cast<int>(value.size());
    Segment s;
    s.j = 0;
    if (length <= 0.0 || samples < 2) {
        s.t = {0.0};
        s.x = {value};
    } else {
        for (int i = 0; i < samples; ++i) {
            double t = -length + length * i / (samples - 1);
            if (i == samples - 1) t = 0.0;
            s.t.push_back(t);
            s.x.push_back(value);
        }
    }
    a.segments.push_back(std::move(s));
    return a;
}

namespace {

// windows of the arc seen from (t,j), highest jump index first
struct RawWindow {
    int k;
    double lo, hi;
};

RawWindow raw_window(const HybridArc& arc, double t, int j, int jb)
{
    const Segment& s = arc.seg(jb);
    double hi = jb == j ? 0.0 : std::min(std::min(s.t1(), t) - t, 0.0);
    double lo = std::min(s.t0() - t, hi);
    return {jb - j, lo, hi};
}

}  // namespace

MemoryArc MemoryArc::view(const HybridArc& arc, double t, int j, double delta)
{
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw Error(Errc::InvalidParam, "memory size must be finite and >= 0");
    if (j < 0 || t < -tau_eq || !arc.has_segment(j) || t < arc.seg(j).t0() - tau_eq ||
        t > arc.seg(j).t1() + tau_eq)
        throw Error(Errc::NotInForwardDomain, "(t,j) not in the forward domain");
    // the initial memory, seen from (0,0), must reach -delta
    const Segment& first = arc.segments.front();
    if (std::min(first.t0(), 0.0) + first.j > -delta + tau_eq)
        throw Error(Errc::MemoryTooShort, "initial memory shorter than delta");

    MemoryArc m;
    m.ref_ = &arc;
    m.t_ = t;
    m.j_ = j;
    m.delta_ = delta;

    std::vector<RawWindow> raw;
    double dinf = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int jb = j; jb >= arc.j_min() && !found; --jb) {
        RawWindow w = raw_window(arc, t, j, jb);
        raw.push_back(w);
        if (w.lo + w.k <= -delta + tau_eq) {
            double cand = std::max(delta, -(w.hi + w.k));
            if (std::abs(cand - delta) <= tau_eq) cand = delta;
            dinf = cand;
            found = true;
        }
    }
    if (!found) throw Error(Errc::MemoryTooShort, "memory does not reach -delta");
    m.delta_inf_ = dinf;
    for (const auto& w : raw) {
        double lo = std::max(w.lo, -dinf - w.k);
        if (lo > w.hi + tau_eq) continue;
        lo = std::min(lo, w.hi);
        m.windows_.push_back({w.k, lo, w.hi});
    }
    // windows_ must be indexed by -k without holes
    for (size_t i = 0; i < m.windows_.size(); ++i)
        if (m.windows_[i].k != -static_cast<int>(i))
            throw Error(Errc::InvalidArc, "memory window with a hole");
    return m;
}

MemoryArc MemoryArc::view(std::shared_ptr<const HybridArc> arc, double t, int j, double delta)
{
    MemoryArc m = view(*arc, t, j, delta);
    m.ref_ = nullptr;
    m.owned_ = std::move(arc);
    return m;
}

MemoryArc MemoryArc::owned(HybridArc arc, double delta)
{
    validate_arc(arc);
    if (!arc.is_memory()) throw Error(Errc::InvalidArc, "not a memory arc");
    MemoryArc m;
    arc.delta = delta;
    m.delta_ = delta;
    m.t_ = 0.0;
    m.j_ = 0;
    for (int jb = 0; jb >= arc.j_min(); --jb) {
        const Segment& s = arc.seg(jb);
        m.windows_.push_back({jb, s.t0(), std::min(0.0, s.t1())});
    }
    // delta_inf as the memory operator at (0,0) would report it
    m.delta_inf_ = std::numeric_limits<double>::infinity();
    for (const auto& w : m.windows_) {
        if (w.lo + w.k <= -delta + tau_eq) {
            double cand = std::max(delta, -(w.hi + w.k));
            if (std::abs(cand - delta) <= tau_eq) cand = delta;
            m.delta_inf_ = cand;
            break;
        }
    }
    m.owned_ = std::make_shared<const HybridArc>(std::move(arc));
    return m;
}

const Window* MemoryArc::window(int k) const
{
    if (k > 0 || -k >= static_cast<int>(windows_.size())) return nullptr;
    return &windows_[static_cast<size_t>(-k)];
}

bool MemoryArc::contains(double s, int k, double tol) const
{
    const Window* w = window(k);
    return w && s >= w->lo - tol && s <= w->hi + tol;
}

Vec MemoryArc::eval(double s, int k) const
{
    const Window* w = window(k);
    if (!w || s < w->lo - tau_eq || s > w->hi + tau_eq)
        throw Error(Errc::OutOfDomain, "(s,k) outside memory arc");
    double q = std::clamp(s + sigma_, w->lo, w->hi);
    Vec v = base().seg(j_ + k).eval(t_ + q);
    if (!offset_.empty())
        for (size_t c = 0; c < v.size(); ++c) v[c] += offset_[c];
    return v;
}

std::optional<Vec> MemoryArc::latest(double s) const
{
    for (const auto& w : windows_)
        if (s >= w.lo - tau_eq && s <= w.hi + tau_eq) return eval(s, w.k);
    return std::nullopt;
}

double MemoryArc::min_sk() const
{
    double m = std::numeric_limits<double>::infinity();
    for (const auto& w : windows_) m = std::min(m, w.lo + w.k);
    return m;
}

double MemoryArc::sup_norm() const
{
    double m = 0.0;
    HybridArc a = materialize();
    for (const auto& s : a.segments)
        for (const auto& x : s.x) m = std::max(m, norm(x));
    return m;
}

MemoryArc MemoryArc::perturbed(double sigma, const Vec& offset) const
{
    MemoryArc m = *this;
    m.sigma_ = sigma;
    m.offset_ = offset;
    return m;
}

HybridArc MemoryArc::materialize() const
{
    HybridArc out;
    out.n = n();
    out.delta = delta_;
    for (auto it = windows_.rbegin(); it != windows_.rend(); ++it) {
        const Window& w = *it;
        const Segment& src = base().seg(j_ + w.k);
        Segment s;
        s.j = w.k;
        std::vector<double> times{w.lo};
        for (double bt : src.t) {
            double q = bt - t_;
            if (q > w.lo + tau_eq && q < w.hi - tau_eq) times.push_back(q);
        }
        if (w.hi > w.lo) times.push_back(w.hi);
        for (double q : times) {
            s.t.push_back(q);
            s.x.push_back(eval(q, w.k));
        }
        out.segments.push_back(std::move(s));
    }
    return out;
}

MemoryArc memory_view(const HybridArc& arc, double t, int j, double delta)
{
    return MemoryArc::view(arc, t, j, delta);
}

MemoryArc append_jump(const MemoryArc& phi, const Vec& g)
{
    if (static_cast<int>(g.size()) != phi.n())
        throw Error(Errc::InvalidParam, "jump value dimension mismatch");
    HybridArc a = phi.materialize();
    for (auto& s : a.segments) s.j -= 1;
    Segment top;
    top.j = 0;
    top.t = {0.0};
    top.x = {g};
    a.segments.push_back(std::move(top));
    return MemoryArc::owned(std::move(a), phi.delta());
}

MDeltaCheck check_mdelta(const MemoryArc& phi)
{
    MDeltaCheck c;
    double m = phi.min_sk();
    double d = phi.delta();
    c.cond1 = m >= -d - 1.0 - tau_eq;
    c.cond2 = m <= -d + tau_eq;
    c.window_ok = phi.delta_inf() >= d - tau_eq && phi.delta_inf() < d + 1.0;
    return c;
}

ClassCertificate classify(const HybridArc& arc, double b, double lambda)
{
    ClassCertificate c;
    for (const auto& s : arc.segments) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            c.sup_norm = std::max(c.sup_norm, norm(s.x[i]));
            if (i > 0) {
                double slope = distance(s.x[i], s.x[i - 1]) / (s.t[i] - s.t[i - 1]);
                c.lipschitz = std::max(c.lipschitz, slope);
            }
        }
    }
    c.in_Mb = c.sup_norm <= b;
    c.in_Mblambda = c.in_Mb && c.lipschitz <= lambda;
    return c;
}

ClassCertificate classify(const MemoryArc& phi, double b, double lambda)
{
    return classify(phi.materialize(), b, lambda);
}

}  // namespace hmk
