#include "hmk/examples.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "hmk/arc_io.hpp"

namespace hmk {

namespace {

constexpr double outside = std::numeric_limits<double>::infinity();

Margin timer_flow_margin(int idx, double period)
{
    return [idx, period](const MemoryArc& phi) {
        double tau = phi.top()[static_cast<size_t>(idx)];
        return std::max(tau - period, -tau);
    };
}

Margin timer_jump_margin(int idx, double period)
{
    return [idx, period](const MemoryArc& phi) { return std::abs(phi.top()[static_cast<size_t>(idx)] - period); };
}

}  // namespace

SystemData impulsive_dde(const DdeParams& p)
{
    if (!(p.delta_timer > 0.0)) throw Error(Errc::InvalidParam, "delta_timer must be > 0");
    if (!(p.delta >= 2.0)) throw Error(Errc::InvalidParam, "memory must cover the delay 2");
    SystemData s;
    s.name = "dde";
    s.n = 2;
    s.delta = p.delta;
    s.flow_margin = timer_flow_margin(1, p.delta_timer);
    s.jump_margin = timer_jump_margin(1, p.delta_timer);
    s.flow_map = [](const MemoryArc& phi) -> std::vector<Vec> {
        auto past = phi.latest(-2.0);
        if (!past) return {};
        return {Vec{(*past)[0], 1.0}};
    };
    if (p.literal_jump) {
        s.jump_map = [](const MemoryArc& phi) -> std::vector<Vec> {
            if (!phi.contains(-2.0, 0)) return {};
            return {Vec{2.0 * phi.eval(-2.0, 0)[0], 0.0}};
        };
    } else {
        s.jump_map = [](const MemoryArc& phi) -> std::vector<Vec> { return {Vec{2.0 * phi.top()[0], 0.0}}; };
    }
    s.lambda_of_b = [](double b) { return b + 1.0; };
    s.clocks = {{1, 0.0, p.delta_timer}};
    s.rest_state = [](double x0) { return Vec{x0, 0.0}; };
    return s;
}

SystemData event_triggered(const EtcParams& p)
{
    if (!(p.hs >= 0.0) || !(p.hu >= 0.0) || !(p.h > 0.0) || p.hs + p.hu > p.h + tau_eq)
        throw Error(Errc::InvalidDelays, "need hs, hu >= 0 and hs + hu <= h");
    if (!(p.sigma >= 0.0)) throw Error(Errc::InvalidParam, "trigger gain must be >= 0");
    SystemData s;
    s.name = "etc";
    s.n = 2;
    s.delta = p.h + 1.0;
    const double k = p.k, sigma = p.sigma, hs = p.hs, hu = p.hu;
    auto trigger = [k, sigma, hs](const MemoryArc& phi) {
        auto xs = phi.latest(-hs);
        if (!xs) return outside;
        double u = phi.top()[1];
        double x = (*xs)[0];
        return std::abs(u + k * x) - sigma * std::abs(x);
    };
    s.flow_margin = trigger;
    s.jump_margin = [trigger](const MemoryArc& phi) {
        double m = trigger(phi);
        return std::isinf(m) ? outside : -m;
    };
    s.flow_map = [hu](const MemoryArc& phi) -> std::vector<Vec> {
        auto ud = phi.latest(-hu);
        if (!ud) return {};
        return {Vec{phi.top()[0] + (*ud)[1], 0.0}};
    };
    s.jump_map = [k, hs](const MemoryArc& phi) -> std::vector<Vec> {
        auto xs = phi.latest(-hs);
        if (!xs) return {};
        return {Vec{phi.top()[0], -k * (*xs)[0]}};
    };
    s.lambda_of_b = [](double b) { return 2.0 * b + 1.0; };
    s.rest_state = [k](double x0) { return Vec{x0, -k * x0}; };
    return s;
}

SystemData decay_system(const DecayParams& p)
{
    if (!(p.a >= 0.0)) throw Error(Errc::InvalidParam, "decay rate must be >= 0");
    if (!(p.lj > 0.0 && p.lj <= 1.0)) throw Error(Errc::InvalidParam, "jump factor must lie in (0,1]");
    if (!(p.period > 0.0)) throw Error(Errc::InvalidParam, "period must be > 0");
    SystemData s;
    s.name = "decay";
    s.n = 2;
    s.delta = 0.0;
    s.flow_margin = timer_flow_margin(1, p.period);
    s.jump_margin = timer_jump_margin(1, p.period);
    const double a = p.a, lj = p.lj;
    s.flow_map = [a](const MemoryArc& phi) -> std::vector<Vec> { return {Vec{-a * phi.top()[0], 1.0}}; };
    s.jump_map = [lj](const MemoryArc& phi) -> std::vector<Vec> { return {Vec{lj * phi.top()[0], 0.0}}; };
    s.lambda_of_b = [a](double b) { return a * b + 1.0; };
    s.clocks = {{1, 0.0, p.period}};
    s.rest_state = [](double x0) { return Vec{x0, 0.0}; };
    return s;
}

SystemData affine_delay(const AffineParams& p)
{
    const int n = p.n;
    auto check = [n](const std::vector<std::vector<double>>& m, const char* what) {
        if (static_cast<int>(m.size()) != n) throw Error(Errc::InvalidParam, std::string(what) + " has wrong size");
        for (const auto& r : m)
            if (static_cast<int>(r.size()) != n) throw Error(Errc::InvalidParam, std::string(what) + " has wrong size");
    };
    if (n <= 0) throw Error(Errc::InvalidParam, "n must be positive");
    check(p.A, "A");
    check(p.B, "B");
    check(p.Jm, "J");
    if (!(p.d >= 0.0) || !(p.period > 0.0)) throw Error(Errc::InvalidParam, "bad delay or period");
    double delta = p.delta < 0.0 ? p.d : p.delta;
    if (delta < p.d) throw Error(Errc::InvalidParam, "memory shorter than the delay");

    SystemData s;
    s.name = "affine";
    s.n = n + 1;
    s.delta = delta;
    s.flow_margin = timer_flow_margin(n, p.period);
    s.jump_margin = timer_jump_margin(n, p.period);
    auto mul = [n](const std::vector<std::vector<double>>& m, const Vec& x, Vec& out) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                out[static_cast<size_t>(r)] += m[static_cast<size_t>(r)][static_cast<size_t>(c)] * x[static_cast<size_t>(c)];
    };
    const auto A = p.A, B = p.B, Jm = p.Jm;
    const double d = p.d;
    s.flow_map = [=](const MemoryArc& phi) -> std::vector<Vec> {
        auto past = phi.latest(-d);
        if (!past) return {};
        Vec v(static_cast<size_t>(n) + 1, 0.0);
        mul(A, phi.top(), v);
        mul(B, *past, v);
        v[static_cast<size_t>(n)] = 1.0;
        return {v};
    };
    s.jump_map = [=](const MemoryArc& phi) -> std::vector<Vec> {
        Vec g(static_cast<size_t>(n) + 1, 0.0);
        mul(Jm, phi.top(), g);
        return {g};
    };
    double na = 0.0;
    for (const auto& r : A)
        for (double v : r) na += std::abs(v);
    for (const auto& r : B)
        for (double v : r) na += std::abs(v);
    s.lambda_of_b = [na](double b) { return na * b + 1.0; };
    s.clocks = {{n, 0.0, p.period}};
    s.rest_state = [n](double x0) {
        Vec v(static_cast<size_t>(n) + 1, x0);
        v[static_cast<size_t>(n)] = 0.0;
        return v;
    };
    return s;
}

ExampleSpec parse_example_spec(const std::string& text)
{
    ExampleSpec spec;
    auto colon = text.find(':');
    spec.name = text.substr(0, colon);
    if (colon == std::string::npos) return spec;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(Errc::InvalidParam, "expected key=value in '" + item + "'");
        std::string key = item.substr(0, eq);
        std::string val = item.substr(eq + 1);
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(val, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != val.size() || val.empty()) throw Error(Errc::InvalidParam, "bad number for " + key);
        spec.params[key] = v;
    }
    return spec;
}

namespace {

double take(std::map<std::string, double>& m, const std::string& key, double def)
{
    auto it = m.find(key);
    if (it == m.end()) return def;
    double v = it->second;
    m.erase(it);
    return v;
}

}  // namespace

SystemData make_system(const ExampleSpec& spec)
{
    auto params = spec.params;
    SystemData s;
    if (spec.name == "dde") {
        DdeParams p;
        p.delta_timer = take(params, "delta_timer", p.delta_timer);
        p.delta = take(params, "delta", p.delta);
        p.literal_jump = take(params, "literal", 0.0) != 0.0;
        s = impulsive_dde(p);
    } else if (spec.name == "etc") {
        EtcParams p;
        p.hs = take(params, "hs", p.hs);
        p.hu = take(params, "hu", p.hu);
        p.h = take(params, "h", std::max(p.h, p.hs + p.hu));
        p.k = take(params, "k", p.k);
        p.sigma = take(params, "sigma", p.sigma);
        s = event_triggered(p);
    } else if (spec.name == "decay") {
        DecayParams p;
        p.a = take(params, "a", p.a);
        p.lj = take(params, "lj", p.lj);
        p.period = take(params, "period", p.period);
        s = decay_system(p);
    } else {
        throw Error(Errc::InvalidParam, "unknown system '" + spec.name + "'");
    }
    if (!params.empty()) throw Error(Errc::InvalidParam, "unknown parameter '" + params.begin()->first + "'");
    return s;
}

SystemData make_system(const std::string& text) { return make_system(parse_example_spec(text)); }

SystemData system_from_json_file(const std::string& path)
{
    using nlohmann::json;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidParam, std::string("malformed system spec: ") + e.what());
    }
    try {
        std::string tpl = j.value("template", "");
        if (tpl == "dde" || tpl == "etc" || tpl == "decay") {
            ExampleSpec spec{tpl, {}};
            if (j.contains("params"))
                for (auto& [k, v] : j.at("params").items()) spec.params[k] = v.get<double>();
            return make_system(spec);
        }
        if (tpl != "affine") throw Error(Errc::InvalidParam, "unknown template '" + tpl + "'");
        AffineParams p;
        p.n = j.at("n").get<int>();
        p.A = j.at("A").get<std::vector<std::vector<double>>>();
        p.B = j.at("B").get<std::vector<std::vector<double>>>();
        p.Jm = j.at("J").get<std::vector<std::vector<double>>>();
        p.d = j.value("d", 0.0);
        p.period = j.value("period", 1.0);
        p.delta = j.value("delta", -1.0);
        return affine_delay(p);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidParam, std::string("bad system spec: ") + e.what());
    }
}

HybridArc canonical_history(const SystemData& s, double x0)
{
    Vec v = s.rest_state ? s.rest_state(x0) : Vec(static_cast<size_t>(s.n), x0);
    HybridArc a = constant_history(v, s.delta, s.delta > 0.0 ? 2 : 1);
    a.delta = s.delta;
    return a;
}

}  // namespace hmk
