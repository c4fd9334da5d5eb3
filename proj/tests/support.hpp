/*
   Copyright 2026 The jumpdiff Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include "jumpdiff/fields.hpp"
#include "jumpdiff/geometry.hpp"

#include <cmath>
#include <vector>

namespace jumpdiff::testing {

/// sum_i c[i] x^i
inline ScalarField poly1(const std::vector<double>& c) {
    std::vector<Monomial> terms;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) terms.push_back({c[i], static_cast<int>(i), 0});
    return ScalarField::polynomial(terms);
}

inline ScalarField cst(double c) { return ScalarField::constant(c); }

inline const Domain& unit_interval() {
    static const Domain d = Domain::interval(0.0, 1.0);
    return d;
}

inline CoefficientSet interval_coeffs(ScalarField a, ScalarField V, ScalarField mu, ScalarField f, int k,
                                      ScalarField b = ScalarField::constant(0.0), CoefficientChecks checks = {}) {
    return CoefficientSet(unit_interval(), MatrixField::isotropic(1, std::move(a), {std::move(b), cst(0.0)}),
                          std::move(V), std::move(mu), std::move(f), k, checks);
}

// 1D presets on (0, 1) with a = 1 unless noted.
inline CoefficientSet uniform_k0() { return interval_coeffs(cst(1), cst(1), cst(1), poly1({0, 1}), 0); }
inline CoefficientSet beta22_k1() { return interval_coeffs(cst(1), cst(1), poly1({0, 6, -6}), poly1({0, 1}), 1); }
// 30 x^2 (1-x)^2 = 30 x^2 - 60 x^3 + 30 x^4
inline CoefficientSet quartic_k2() {
    return interval_coeffs(cst(1), cst(1), poly1({0, 0, 30, -60, 30}), poly1({0, 1}), 2);
}
// mu = (1 + 2x)/2, V = 1 + 3x: endpoint weights mu / sqrt(V) = {1/2, 3/4}, ratio {1, 1.5}.
inline CoefficientSet asym_k0() { return interval_coeffs(cst(1), poly1({1, 3}), poly1({0.5, 1}), poly1({0, 1}), 0); }

/// Exact principal eigenvalue for a = V = 1, mu = 1 on (0, 1): the root of
/// lambda = (2/r) tanh(r/2), r = sqrt(2 (1 - lambda) / delta), found by bisection.
inline double uniform_k0_eigenvalue(double delta) {
    auto g = [delta](double lam) {
        const double r = std::sqrt(2.0 * (1.0 - lam) / delta);
        return lam - (2.0 / r) * std::tanh(0.5 * r);
    };
    double lo = 1e-300, hi = 1.0 - 1e-15;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Deterministic generator for property tests (splitmix64).
class Gen {
public:
    explicit Gen(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::uint64_t s_;
};

} // namespace jumpdiff::testing
