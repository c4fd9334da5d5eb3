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

#include <cmath>

namespace jumpdiff {

/// A point (or vector) in R^1 or R^2. One-dimensional problems leave y at 0.
struct Point {
    double x = 0.0;
    double y = 0.0;

    constexpr double operator[](int axis) const { return axis == 0 ? x : y; }
    constexpr double& operator[](int axis) { return axis == 0 ? x : y; }

    constexpr Point& operator+=(Point o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr Point& operator-=(Point o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    friend constexpr Point operator+(Point a, Point b) { return a += b; }
    friend constexpr Point operator-(Point a, Point b) { return a -= b; }
    friend constexpr Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
    friend constexpr bool operator==(Point, Point) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }

/// Multi-index for partial derivatives: d^(i+j) / dx^i dy^j.
struct MultiIndex {
    int i = 0;
    int j = 0;

    constexpr int order() const { return i + j; }
    friend constexpr MultiIndex operator+(MultiIndex a, MultiIndex b) {
        return {a.i + b.i, a.j + b.j};
    }
    friend constexpr bool operator==(MultiIndex, MultiIndex) = default;
};

/// Unit multi-index along an axis.
constexpr MultiIndex unit_index(int axis) { return axis == 0 ? MultiIndex{1, 0} : MultiIndex{0, 1}; }

} // namespace jumpdiff
