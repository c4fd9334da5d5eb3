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

#include "doctest.h"
#include "jumpdiff/error.hpp"
#include "jumpdiff/fields.hpp"
#include "support.hpp"

#include <cmath>

using namespace jumpdiff;
using namespace jumpdiff::testing;

namespace {

MatrixField scalar_a(ScalarField a, ScalarField b = cst(0)) { return MatrixField::isotropic(1, std::move(a), {std::move(b), cst(0)}); }

// x^3 (1-x)^3 times a random cubic: vanishes with two derivatives at 0 and 1.
ScalarField bump1(Gen& g) {
    const ScalarField cube = poly1({0, 0, 0, 1});
    const ScalarField one_minus = poly1({1, -1});
    return cube * one_minus * one_minus * one_minus *
           poly1({g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1)});
}

ScalarField py(double c, int p) { return ScalarField::polynomial({{c, 0, p}}); }

} // namespace

TEST_CASE("apply_L examples") {
    const Point x{0.37, 0};
    CHECK(apply_L(scalar_a(cst(1)), poly1({0, 0, 1}))(x) == doctest::Approx(1.0));
    CHECK(apply_L(scalar_a(cst(1), cst(2)), poly1({0, 1}))(x) == doctest::Approx(2.0));
    for (double t : {0.0, 0.2, 0.9, 1.7}) CHECK(apply_L(scalar_a(poly1({1, 0, 1})), poly1({0, 1}))({t, 0}) == doctest::Approx(t));
}

TEST_CASE("apply_L_tilde examples") {
    Gen g(3);
    const MatrixField sym = scalar_a(poly1({1, 0.5}));
    const ScalarField psi = poly1({0.2, -1, 3, 0.5});
    for (double t : {0.1, 0.5, 0.8}) CHECK(apply_L_tilde(sym, psi)({t, 0}) == doctest::Approx(apply_L(sym, psi)({t, 0})));
    CHECK(apply_L_tilde(scalar_a(cst(1), cst(2.5)), poly1({0, 1}))({0.3, 0}) == doctest::Approx(-2.5));
    const CoefficientSet q = quartic_k2();
    CHECK(apply_L_tilde(q, q.mu())({0, 0}) == doctest::Approx(30.0));
    CHECK(apply_L_tilde(q, q.mu())({1, 0}) == doctest::Approx(30.0));
}

TEST_CASE("apply_L_tilde_power examples") {
    const CoefficientSet c = uniform_k0();
    const ScalarField psi = poly1({0.1, 0, 2, 0, 1});
    for (double t : {0.0, 0.4}) {
        CHECK(apply_L_tilde_power(c, psi, 0)({t, 0}) == psi({t, 0}));
        CHECK(apply_L_tilde_power(c, psi, 1)({t, 0}) == apply_L_tilde(c, psi)({t, 0}));
    }
    CHECK(apply_L_tilde_power(c, poly1({0, 0, 0, 0, 1}), 2)({0.77, 0}) == doctest::Approx(6.0));
}

TEST_CASE("nondivergence drift examples") {
    const auto B0 = nondivergence_drift(scalar_a(cst(3), cst(0.7)));
    CHECK(B0[0]({0.2, 0}) == doctest::Approx(0.7));
    const auto B1 = nondivergence_drift(scalar_a(poly1({1, 0, 1})));
    for (double t : {0.0, 0.3, 0.8}) CHECK(B1[0]({t, 0}) == doctest::Approx(t));
    const auto B2 = nondivergence_drift(MatrixField::isotropic(2, cst(1), {cst(1), cst(2)}));
    CHECK(B2[0]({0.3, 0.4}) == doctest::Approx(1.0));
    CHECK(B2[1]({0.3, 0.4}) == doctest::Approx(2.0));
}

TEST_CASE("diffusion root examples") {
    const Mat2 s = cholesky({1, 0, 0, 1}, 2);
    CHECK(s.xx == 1.0);
    CHECK(s.yy == 1.0);
    CHECK(s.xy == 0.0);
    CHECK(s.yx == 0.0);
    CHECK(cholesky({4, 0, 0, 0}, 1).xx == doctest::Approx(2.0));
    const Mat2 r = cholesky({2, 1, 1, 2}, 2);
    CHECK(std::abs(r.xx * r.xx - 2) <= 1e-12);
    CHECK(std::abs(r.yx * r.xx - 1) <= 1e-12);
    CHECK(std::abs(r.yx * r.yx + r.yy * r.yy - 2) <= 1e-12);
    CHECK(r.xy == 0.0);
    CHECK_THROWS_AS(cholesky({1, 2, 2, 1}, 2), CoefficientError);
    CHECK_THROWS_AS(cholesky({-1, 0, 0, 0}, 1), CoefficientError);
}

TEST_CASE("derivative order is enforced") {
    const Domain& d = unit_interval();
    const ScalarField bb = ScalarField::black_box([](Point p) { return std::sin(p.x); }, d);
    CHECK(bb.reduced_accuracy());
    CHECK(bb.eval({0.4, 0}, {2, 0}) == doctest::Approx(-std::sin(0.4)).epsilon(1e-4));
    CHECK(bb.eval({0.0, 0}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(bb.eval({0.4, 0}, {3, 0}), DerivativeOrderError);
    CHECK_THROWS_AS(apply_L_tilde(scalar_a(cst(1)), bb).eval({0.4, 0}, {1, 0}), DerivativeOrderError);
    const ScalarField dist = ScalarField::distance_power(d, 2);
    CHECK(dist({0.25, 0}) == doctest::Approx(0.0625));
    CHECK(dist.eval({0.25, 0}, {1, 0}) == doctest::Approx(0.5));
    CHECK(dist.eval({0.75, 0}, {1, 0}) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(dist.eval({0.25, 0}, {3, 0}), DerivativeOrderError);
}

TEST_CASE("builtin atoms have closed-form derivatives") {
    const ScalarField s = ScalarField::trig(TrigKind::Sin, {2, 3}, 0.1, 1.5);
    const Point x{0.3, -0.2};
    const double arg = 2 * 0.3 + 3 * -0.2 + 0.1;
    CHECK(s.eval(x, {1, 2}) == doctest::Approx(-1.5 * 2 * 9 * std::cos(arg)));
    const ScalarField e = ScalarField::exponential({0.5, -1}, 2.0);
    CHECK(e.eval(x, {2, 1}) == doctest::Approx(2.0 * 0.25 * -1 * std::exp(0.15 + 0.2)));
}

TEST_CASE("coefficient validation") {
    CHECK_THROWS_AS(interval_coeffs(cst(1), cst(0), cst(1), cst(0), 0), CoefficientError);
    CHECK_THROWS_AS(interval_coeffs(cst(1), cst(1), cst(2), cst(0), 0), CoefficientError);
    CHECK_THROWS_AS(interval_coeffs(poly1({-0.5, 1}), cst(1), cst(1), cst(0), 0), CoefficientError);
    CHECK_THROWS_AS(interval_coeffs(cst(1), cst(1), poly1({2, -2}) + cst(-0.5), cst(0), 0), CoefficientError);
    CoefficientChecks relaxed;
    relaxed.require_positive_V = false;
    CHECK_NOTHROW(interval_coeffs(cst(1), poly1({0, 1}), cst(1), cst(0), 0, cst(0), relaxed));
}

TEST_CASE("property: mixed partials commute") {
    Gen g(11);
    for (int t = 0; t < 50; ++t) {
        const ScalarField f = ScalarField::polynomial({{g.uniform(-1, 1), 2, 1}, {g.uniform(-1, 1), 1, 3}}) *
                              ScalarField::trig(TrigKind::Cos, {g.uniform(-2, 2), g.uniform(-2, 2)}, 0.3) +
                              ScalarField::exponential({g.uniform(-1, 1), g.uniform(-1, 1)});
        const Point x{g.uniform(-1, 1), g.uniform(-1, 1)};
        const double a = f.derivative({1, 0}).derivative({0, 1})(x);
        const double b = f.derivative({0, 1}).derivative({1, 0})(x);
        CHECK(a == f.eval(x, {1, 1}));
        CHECK(b == f.eval(x, {1, 1}));
    }
}

TEST_CASE("property: adjointness of L and L-tilde in 1D") {
    Gen g(21);
    const InteriorQuadrature q = interior_quadrature(unit_interval(), 20001);
    for (int t = 0; t < 20; ++t) {
        const MatrixField m = scalar_a(poly1({1 + g.uniform(0, 1), g.uniform(-0.5, 0.5), g.uniform(0, 1)}),
                                       poly1({g.uniform(-2, 2), g.uniform(-2, 2), g.uniform(-2, 2)}));
        const ScalarField phi = bump1(g), psi = bump1(g);
        const ScalarField Lphi = apply_L(m, phi), Ltpsi = apply_L_tilde(m, psi);
        double lhs = 0, rhs = 0, scale = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            lhs += q.weights[i] * Lphi(q.nodes[i]) * psi(q.nodes[i]);
            rhs += q.weights[i] * phi(q.nodes[i]) * Ltpsi(q.nodes[i]);
            scale += q.weights[i] * std::abs(Lphi(q.nodes[i]) * psi(q.nodes[i]));
        }
        CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(scale, 1e-3));
    }
}

TEST_CASE("property: adjointness of L and L-tilde in 2D with a full matrix") {
    Gen g(22);
    const InteriorQuadrature q = interior_quadrature(Domain::rectangle({0, 0}, {1, 1}), 201);
    const ScalarField bx = poly1({0, 0, 0, 1}) * poly1({1, -1}) * poly1({1, -1}) * poly1({1, -1});
    const ScalarField by = py(1, 3) * (cst(1) - py(1, 1)) * (cst(1) - py(1, 1)) * (cst(1) - py(1, 1));
    for (int t = 0; t < 5; ++t) {
        const MatrixField m = MatrixField::general(
            cst(2) + ScalarField::polynomial({{g.uniform(0, 1), 2, 0}}), ScalarField::polynomial({{0.3, 1, 1}}),
            cst(1.5) + ScalarField::polynomial({{g.uniform(0, 1), 0, 1}}),
            {ScalarField::polynomial({{1, 1, 0}, {1, 0, 1}}), ScalarField::polynomial({{1, 0, 0}, {-g.uniform(0, 2), 1, 1}})});
        const ScalarField phi = bx * by * ScalarField::polynomial({{1, 0, 0}, {g.uniform(-1, 1), 1, 0}});
        const ScalarField psi = bx * by * ScalarField::polynomial({{1, 0, 0}, {g.uniform(-1, 1), 0, 1}});
        const ScalarField Lphi = apply_L(m, phi), Ltpsi = apply_L_tilde(m, psi);
        double lhs = 0, rhs = 0, scale = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            lhs += q.weights[i] * Lphi(q.nodes[i]) * psi(q.nodes[i]);
            rhs += q.weights[i] * phi(q.nodes[i]) * Ltpsi(q.nodes[i]);
            scale += q.weights[i] * std::abs(Lphi(q.nodes[i]) * psi(q.nodes[i]));
        }
        CHECK(std::abs(lhs - rhs) <= 1e-6 * scale);
    }
}

TEST_CASE("property: L-tilde power recursion is exact") {
    Gen g(5);
    const CoefficientSet c = interval_coeffs(poly1({1, 0.3}), cst(1), cst(1), cst(0), 0, poly1({0.2, -0.4}));
    for (int t = 0; t < 20; ++t) {
        const ScalarField psi = poly1({g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1),
                                       g.uniform(-1, 1), g.uniform(-1, 1)});
        const int m = g.integer(0, 2);
        const Point x{g.uniform(0, 1), 0};
        CHECK(apply_L_tilde_power(c, psi, m + 1)(x) == apply_L_tilde(c, apply_L_tilde_power(c, psi, m))(x));
    }
}

TEST_CASE("property: diffusion root reconstructs a at random points") {
    Gen g(99);
    const Domain sq = Domain::rectangle({0, 0}, {1, 1});
    const MatrixField m = MatrixField::general(cst(2) + ScalarField::polynomial({{1, 2, 0}}),
                                               ScalarField::polynomial({{0.5, 1, 1}}), cst(1) + ScalarField::polynomial({{1, 0, 1}}));
    const CoefficientSet c(sq, m, cst(1), cst(1), cst(0), 0);
    for (int t = 0; t < 100; ++t) {
        const Point x{g.uniform(0, 1), g.uniform(0, 1)};
        const Mat2 s = diffusion_root(c, x);
        const Mat2 a = m.a_at(x);
        CHECK(std::abs(s.xx * s.xx + s.xy * s.xy - a.xx) <= 1e-12);
        CHECK(std::abs(s.xx * s.yx + s.xy * s.yy - a.xy) <= 1e-12);
        CHECK(std::abs(s.yx * s.yx + s.yy * s.yy - a.yy) <= 1e-12);
    }
}
