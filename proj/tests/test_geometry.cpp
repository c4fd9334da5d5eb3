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
#include "jumpdiff/geometry.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace jumpdiff;
using jumpdiff::testing::Gen;

TEST_CASE("signed distance") {
    CHECK(Domain::interval(0, 1).signed_distance({0.3, 0}) == doctest::Approx(0.3));
    CHECK(Domain::interval(0, 1).signed_distance({1.5, 0}) == doctest::Approx(-0.5));
    CHECK(Domain::disk({0, 0}, 1).signed_distance({0.6, 0}) == doctest::Approx(0.4));
    CHECK(Domain::annulus({0, 0}, 0.5, 1).signed_distance({0.7, 0}) == doctest::Approx(0.2));
    CHECK(Domain::annulus({0, 0}, 0.5, 1).signed_distance({0.1, 0}) == doctest::Approx(-0.4));
    CHECK(Domain::rectangle({0, 0}, {2, 1}).signed_distance({1.5, 0.5}) == doctest::Approx(0.5));
    CHECK(Domain::rectangle({0, 0}, {1, 1}).signed_distance({2, 2}) == doctest::Approx(-std::sqrt(2.0)));
}

TEST_CASE("inward normals") {
    CHECK(Domain::interval(0, 1).inward_normal({0, 0}).x == 1.0);
    CHECK(Domain::interval(0, 1).inward_normal({1, 0}).x == -1.0);
    const double R = 2.5;
    const Point n = Domain::disk({0, 0}, R).inward_normal({R, 0});
    CHECK(n.x == doctest::Approx(-1.0));
    CHECK(n.y == doctest::Approx(0.0));
    const Point m = Domain::annulus({0, 0}, R, 2 * R).inward_normal({R, 0});
    CHECK(m.x == doctest::Approx(1.0));
    CHECK(m.y == doctest::Approx(0.0));
    CHECK_THROWS_AS(Domain::disk({0, 0}, 1).inward_normal({0.5, 0}), BoundaryToleranceError);
}

TEST_CASE("boundary quadrature examples") {
    const auto q = boundary_quadrature(Domain::interval(0, 1), 10);
    REQUIRE(q.size() == 2);
    CHECK(q.nodes[0].x == 0.0);
    CHECK(q.nodes[1].x == 1.0);
    CHECK(q.weights[0] == 1.0);
    CHECK(q.weights[1] == 1.0);
    CHECK(q.normals[0].x == 1.0);
    CHECK(q.normals[1].x == -1.0);
    CHECK(std::abs(boundary_quadrature(Domain::disk({0, 0}, 1), 100).total_weight() - 2 * std::numbers::pi) <= 1e-8);
    CHECK(std::abs(boundary_quadrature(Domain::rectangle({0, 0}, {1, 1}), 50).total_weight() - 4.0) <= 1e-10);
    const auto a = boundary_quadrature(Domain::annulus({0, 0}, 0.5, 1), 64);
    CHECK(a.size() == 128);
    CHECK(a.total_weight() == doctest::Approx(3 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("contains") {
    CHECK(Domain::interval(0, 1).contains({0.5, 0}));
    CHECK_FALSE(Domain::interval(0, 1).contains({1.5, 0}));
    CHECK(Domain::disk({0, 0}, 1).contains({0, 0.99}));
    CHECK_FALSE(Domain::disk({0, 0}, 1).contains({1, 0}));
}

TEST_CASE("invalid domains are rejected") {
    CHECK_THROWS_AS(Domain::interval(1, 1), ConfigError);
    CHECK_THROWS_AS(Domain::rectangle({0, 0}, {1, 0}), ConfigError);
    CHECK_THROWS_AS(Domain::disk({0, 0}, 0), ConfigError);
    CHECK_THROWS_AS(Domain::annulus({0, 0}, 1, 1), ConfigError);
    CHECK_THROWS_AS(Domain::annulus({0, 0}, 0, 1), ConfigError);
}

TEST_CASE("property: quadrature nodes lie on the boundary with unit inward normals") {
    const Domain domains[] = {Domain::interval(-1, 2), Domain::rectangle({0, 0}, {2, 1}), Domain::disk({1, -1}, 0.7),
                              Domain::annulus({0.3, 0.2}, 0.4, 1.1)};
    for (const Domain& d : domains) {
        const auto q = boundary_quadrature(d, 37);
        const double eps = 1e-6 * d.diameter();
        for (std::size_t i = 0; i < q.size(); ++i) {
            CHECK(std::abs(d.signed_distance(q.nodes[i])) <= 1e-12 * d.diameter());
            CHECK(std::abs(norm(q.normals[i]) - 1.0) <= 1e-12);
            CHECK(d.contains(q.nodes[i] + eps * q.normals[i]));
            CHECK(q.weights[i] > 0.0);
        }
    }
}

TEST_CASE("property: circle quadrature converges at least quadratically") {
    const Domain d = Domain::disk({0, 0}, 1.3);
    for (int res : {8, 16, 32}) {
        const double e1 = std::abs(boundary_quadrature(d, res).total_weight() - d.boundary_measure());
        CHECK(e1 <= 10.0 / (res * res));
    }
}

TEST_CASE("property: projection lands on the boundary and normals agree") {
    Gen gen(7);
    const Domain domains[] = {Domain::rectangle({0, 0}, {2, 1}), Domain::disk({0, 0}, 1),
                              Domain::annulus({0, 0}, 0.5, 1.0)};
    for (const Domain& d : domains) {
        for (int t = 0; t < 200; ++t) {
            const Point p{gen.uniform(-1.5, 2.5), gen.uniform(-1.5, 1.5)};
            const Point b = d.project_to_boundary(p);
            CHECK(std::abs(d.signed_distance(b)) <= 1e-12 * d.diameter());
            CHECK(std::abs(norm(p - b) - std::abs(d.signed_distance(p))) <= 1e-12);
            const Point n = d.inward_normal(b);
            CHECK(std::abs(norm(n) - 1.0) <= 1e-12);
            const auto [lo, hi] = d.boundary_parameter_range();
            const double s = d.boundary_parameter(b);
            CHECK(s >= lo);
            CHECK(s < hi + 1e-12);
        }
    }
}

TEST_CASE("interior quadrature measures") {
    CHECK(interior_quadrature(Domain::interval(0, 2), 11).total_weight() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(interior_quadrature(Domain::rectangle({0, 0}, {2, 3}), 21).total_weight() ==
          doctest::Approx(6.0).epsilon(1e-13));
    const Domain disk = Domain::disk({0, 0}, 1);
    CHECK(std::abs(interior_quadrature(disk, 400).total_weight() - std::numbers::pi) <= 1e-6 * std::numbers::pi);
    const Domain ann = Domain::annulus({0, 0}, 0.5, 1);
    CHECK(std::abs(interior_quadrature(ann, 400).total_weight() - ann.measure()) <= 1e-6 * ann.measure());
}
