#include <doctest.h>

#include <cmath>

#include "hmk/examples.hpp"
#include "hmk/metrics.hpp"
#include "hmk/solver.hpp"

using namespace hmk;

TEST_CASE("dde defaults")
{
    auto s = impulsive_dde();
    CHECK(s.delta == 3.0);
    CHECK(s.n == 2);
    auto h = canonical_history(s);
    CHECK(h.seg(0).t0() == -3.0);
    CHECK(h.seg(0).x.front() == Vec{1.0, 0.0});
    // delay 2 and doubling jump
    auto phi = MemoryArc::owned(h, 3.0);
    CHECK(s.flow_map(phi).front() == Vec{1.0, 1.0});
    CHECK(s.jump_map(phi).front() == Vec{2.0, 0.0});
    CHECK_THROWS_AS(impulsive_dde({0.0, 3.0, false}), Error);
}

TEST_CASE("dde literal jump map reads x(-2,0)")
{
    auto s = impulsive_dde({1.0, 3.0, true});
    HybridArc a;
    a.n = 2;
    a.segments.push_back({0, {-3.0, 0.0}, {{0.0, 0.0}, {3.0, 1.0}}});
    auto phi = MemoryArc::owned(a, 3.0);
    CHECK(s.jump_map(phi).front()[0] == doctest::Approx(2.0 * 1.0));
    CHECK(impulsive_dde().jump_map(phi).front()[0] == doctest::Approx(6.0));
}

TEST_CASE("dde jumps at integer times")
{
    auto s = impulsive_dde();
    SolveOptions o;
    o.h = 0.01;
    o.T = 1.9;
    auto sol = solve(s, canonical_history(s), o);
    REQUIRE(sol.jumps.size() == 1);
    CHECK(sol.jumps[0].t == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("etc parameters")
{
    auto s = event_triggered();
    CHECK(s.delta == doctest::Approx(1.1));
    CHECK_THROWS_AS(event_triggered({0.1, 0.1, 0.1, 2.0, 0.25}), Error);
    try {
        event_triggered({0.1, 0.1, 0.1, 2.0, 0.25});
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidDelays);
    }
}

TEST_CASE("etc zero delay, vanishing threshold tracks -2x")
{
    // at threshold 0 the jump set is everything, so approach the limit
    double prev_err = 1.0;
    for (double sigma : {0.04, 0.02, 0.01}) {
        auto s = event_triggered({0.0, 0.0, 0.1, 2.0, sigma});
        SolveOptions o;
        o.h = 1e-3;
        o.T = 1.0;
        o.J = 100000;
        auto sol = solve(s, canonical_history(s), o);
        CHECK(sol.status == Status::Complete);
        double prev = 10.0;
        for (const auto& seg : sol.arc.segments) {
            for (size_t i = 0; i < seg.t.size(); ++i) {
                if (seg.t[i] < 0) continue;
                CHECK(seg.x[i][0] <= prev + 1e-12);
                prev = seg.x[i][0];
            }
        }
        for (const auto& jr : sol.jumps) CHECK(jr.post[1] == doctest::Approx(-2.0 * jr.pre[0]));
        // x' = -x between immediate updates
        double err = std::abs(sol.arc.segments.back().x.back()[0] - std::exp(-1.0));
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err <= 0.02 * std::exp(-1.0));

    auto zeno = event_triggered({0.0, 0.0, 0.1, 2.0, 0.0});
    SolveOptions z;
    z.J = 50;
    auto zs = solve(zeno, canonical_history(zeno), z);
    CHECK(zs.status == Status::JumpCapReached);
    CHECK(zs.t_end == 0.0);
}

TEST_CASE("decay closed form")
{
    auto s = decay_system();
    SolveOptions o;
    o.h = 1e-3;
    o.T = 2.0;
    auto sol = solve(s, canonical_history(s), o);
    // x(2,1) is the value just before the second jump
    CHECK(arc_eval(sol.arc, sol.arc.seg(1).t1(), 1)[0] == doctest::Approx(std::exp(-2.0) / 2).epsilon(1e-2));

    auto pure = decay_system({1.0, 1.0, 1.0});
    auto s2 = solve(pure, canonical_history(pure), o);
    CHECK(s2.arc.segments.back().x.back()[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-2));

    auto frozen = decay_system({0.0, 0.5, 1.0});
    auto s3 = solve(frozen, canonical_history(frozen), o);
    for (const auto& seg : s3.arc.segments)
        if (seg.j >= 0)
            for (const auto& x : seg.x) CHECK(x[0] == doctest::Approx(std::pow(0.5, seg.j)));
}

TEST_CASE("system spec strings")
{
    auto sp = parse_example_spec("dde:delta_timer=2,delta=4");
    CHECK(sp.name == "dde");
    CHECK(sp.params.at("delta_timer") == 2.0);
    CHECK(make_system("dde:delta=4").delta == 4.0);
    CHECK(make_system("decay:a=2,lj=0.25").name == "decay");
    CHECK(make_system("etc:hs=0.02,hu=0.03").delta == doctest::Approx(1.1));
    CHECK_THROWS_AS(make_system("nope"), Error);
    CHECK_THROWS_AS(make_system("dde:bogus=1"), Error);
    CHECK_THROWS_AS(make_system("dde:delta=abc"), Error);
}

TEST_CASE("affine template reproduces the dde")
{
    AffineParams p;
    p.n = 1;
    p.A = {{0.0}};
    p.B = {{1.0}};
    p.Jm = {{2.0}};
    p.d = 2.0;
    p.delta = 3.0;
    auto s = affine_delay(p);
    auto ref = impulsive_dde();
    SolveOptions o;
    o.h = 0.01;
    o.T = 1.9;
    auto a = solve(s, canonical_history(s), o);
    auto b = solve(ref, canonical_history(ref), o);
    CHECK(overlap_sup_distance(a.arc, b.arc) <= 1e-12);
}

TEST_CASE("factories pass the regularity probe on converging histories")
{
    for (const char* name : {"dde", "etc", "decay"}) {
        auto s = make_system(name);
        std::vector<std::pair<MemoryArc, Vec>> seq;
        for (int i = 1; i <= 6; ++i) {
            auto phi = MemoryArc::owned(canonical_history(s, 1.0 + 1.0 / i), s.delta);
            auto v = s.flow_map(phi);
            REQUIRE_FALSE(v.empty());
            seq.emplace_back(phi, v.front());
        }
        auto lim = MemoryArc::owned(canonical_history(s, 1.0), s.delta);
        seq.emplace_back(lim, s.flow_map(lim).front());
        CHECK(regularity_probe(s, seq).pass());
    }
}
