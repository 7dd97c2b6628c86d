// random.hpp — seeded generators for coins, fields, states and spectral parameters

#pragma once

#include "qwspec/walk.hpp"

#include <cstdint>
#include <random>

namespace qwspec {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    cd gaussian() {
        std::normal_distribution<double> n(0.0, 1.0);
        double re = n(gen_);
        return {re, n(gen_)};
    }
    Vec2 gaussian_vec() {
        cd x = gaussian();
        return Vec2(x, gaussian());
    }

    // Gram–Schmidt of a complex Gaussian 2x2; rejects |a| < 1e-3
    UnitaryCoin coin() {
        for (;;) {
            Vec2 c0 = gaussian_vec(), c1 = gaussian_vec();
            c0.normalize();
            c1 -= c0.dot(c1) * c0;
            c1.normalize();
            Mat2 m;
            m.col(0) = c0;
            m.col(1) = c1;
            if (std::abs(m(0, 0)) >= 1e-3) return UnitaryCoin(m);
        }
    }

    // random tails plus overrides on a random subset of [−radius, radius]
    CoinField field(int radius = 3) {
        UnitaryCoin left = coin(), right = coin();
        std::map<Site, UnitaryCoin> ov;
        for (int x = -radius; x <= radius; ++x)
            if (uniform() < 0.7) ov.emplace(x, coin());
        return CoinField(left, right, std::move(ov));
    }

    // modulus log-uniform in (rmin, rmax), uniform argument; never on the unit circle
    cd lambda(double rmin, double rmax) {
        for (;;) {
            double r = std::exp(uniform(std::log(rmin), std::log(rmax)));
            if (r == 1.0) continue;
            return std::polar(r, uniform(0.0, 2.0 * kPi));
        }
    }
    // modulus drawn from [lo1,hi1] ∪ [lo2,hi2] with equal probability
    cd lambda_two_bands(double lo1, double hi1, double lo2, double hi2) {
        return uniform() < 0.5 ? lambda(lo1, hi1) : lambda(lo2, hi2);
    }

    // Gaussian entries on [−radius, radius]
    StateVector state(int radius) {
        StateVector f;
        for (int x = -radius; x <= radius; ++x) f.set(x, gaussian_vec());
        return f;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

} // namespace qwspec
