#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "hmk/domain.hpp"

namespace hmk {

// mt19937_64 is specified bit-for-bit by the standard; the distributions are
// not, so the conversions below are done by hand to keep runs reproducible
// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : g_(seed) {}

    std::uint64_t bits() { return g_(); }
    double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Vec unit_vector(int n)
    {
        Vec v(static_cast<size_t>(n));
        double r = 0.0;
        while (r < 1e-12) {
            r = 0.0;
            for (auto& c : v) {
                c = normal();
                r += c * c;
            }
            r = std::sqrt(r);
        }
        for (auto& c : v) c /= r;
        return v;
    }

    Vec in_ball(int n)
    {
        Vec v = unit_vector(n);
        double r = std::pow(uniform(), 1.0 / n);
        for (auto& c : v) c *= r;
        return v;
    }

private:
    std::mt19937_64 g_;
};

}  // namespace hmk
