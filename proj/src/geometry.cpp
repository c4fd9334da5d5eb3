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

#include "jumpdiff/geometry.hpp"

#include "jumpdiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace jumpdiff {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    // fmod can return exactly 2 pi after the shift for tiny negative inputs
    return t >= kTwoPi ? 0.0 : t;
}

} // namespace

std::string to_string(DomainKind kind) {
    switch (kind) {
    case DomainKind::Interval: return "interval";
    case DomainKind::Rectangle: return "rectangle";
    case DomainKind::Disk: return "disk";
    case DomainKind::Annulus: return "annulus";
    }
    return "unknown";
}

Domain Domain::interval(double lo, double hi) {
    if (!(hi > lo)) throw ConfigError("interval requires hi > lo");
    Domain d;
    d.kind_ = DomainKind::Interval;
    d.lower_ = {lo, 0.0};
    d.upper_ = {hi, 0.0};
    return d;
}

Domain Domain::rectangle(Point lower, Point upper) {
    if (!(upper.x > lower.x) || !(upper.y > lower.y))
        throw ConfigError("rectangle requires positive side lengths");
    Domain d;
    d.kind_ = DomainKind::Rectangle;
    d.lower_ = lower;
    d.upper_ = upper;
    return d;
}

Domain Domain::disk(Point center, double radius) {
    if (!(radius > 0.0)) throw ConfigError("disk requires radius > 0");
    Domain d;
    d.kind_ = DomainKind::Disk;
    d.center_ = center;
    d.r_out_ = radius;
    return d;
}

Domain Domain::annulus(Point center, double inner_radius, double outer_radius) {
    if (!(inner_radius > 0.0) || !(outer_radius > inner_radius))
        throw ConfigError("annulus requires 0 < inner radius < outer radius");
    Domain d;
    d.kind_ = DomainKind::Annulus;
    d.center_ = center;
    d.r_in_ = inner_radius;
    d.r_out_ = outer_radius;
    return d;
}

double Domain::diameter() const {
    switch (kind_) {
    case DomainKind::Interval: return upper_.x - lower_.x;
    case DomainKind::Rectangle: return norm(upper_ - lower_);
    case DomainKind::Disk:
    case DomainKind::Annulus: return 2.0 * r_out_;
    }
    return 0.0;
}

double Domain::measure() const {
    switch (kind_) {
    case DomainKind::Interval: return upper_.x - lower_.x;
    case DomainKind::Rectangle: return (upper_.x - lower_.x) * (upper_.y - lower_.y);
    case DomainKind::Disk: return std::numbers::pi * r_out_ * r_out_;
    case DomainKind::Annulus: return std::numbers::pi * (r_out_ * r_out_ - r_in_ * r_in_);
    }
    return 0.0;
}

double Domain::boundary_measure() const {
    switch (kind_) {
    case DomainKind::Interval: return 2.0;
    case DomainKind::Rectangle: return 2.0 * ((upper_.x - lower_.x) + (upper_.y - lower_.y));
    case DomainKind::Disk: return kTwoPi * r_out_;
    case DomainKind::Annulus: return kTwoPi * (r_out_ + r_in_);
    }
    return 0.0;
}

std::pair<Point, Point> Domain::bounding_box() const {
    switch (kind_) {
    case DomainKind::Interval:
    case DomainKind::Rectangle: return {lower_, upper_};
    case DomainKind::Disk:
    case DomainKind::Annulus:
        return {{center_.x - r_out_, center_.y - r_out_}, {center_.x + r_out_, center_.y + r_out_}};
    }
    return {};
}

double Domain::signed_distance(Point p) const {
    switch (kind_) {
    case DomainKind::Interval: return std::min(p.x - lower_.x, upper_.x - p.x);
    case DomainKind::Rectangle: {
        const double dx = std::max({lower_.x - p.x, 0.0, p.x - upper_.x});
        const double dy = std::max({lower_.y - p.y, 0.0, p.y - upper_.y});
        if (dx > 0.0 || dy > 0.0) return -std::hypot(dx, dy);
        return std::min({p.x - lower_.x, upper_.x - p.x, p.y - lower_.y, upper_.y - p.y});
    }
    case DomainKind::Disk: return r_out_ - norm(p - center_);
    case DomainKind::Annulus: {
        const double r = norm(p - center_);
        return std::min(r - r_in_, r_out_ - r);
    }
    }
    return 0.0;
}

bool Domain::on_boundary(Point p) const {
    return std::abs(signed_distance(p)) <= boundary_tolerance();
}

Point Domain::inward_normal(Point p) const {
    if (!on_boundary(p))
        throw BoundaryToleranceError("inward_normal: point is not on the boundary (distance " +
                                     std::to_string(signed_distance(p)) + ")");
    const double tol = boundary_tolerance();
    switch (kind_) {
    case DomainKind::Interval:
        return std::abs(p.x - lower_.x) <= std::abs(upper_.x - p.x) ? Point{1.0, 0.0} : Point{-1.0, 0.0};
    case DomainKind::Rectangle: {
        Point n{};
        if (std::abs(p.x - lower_.x) <= tol) n += Point{1.0, 0.0};
        if (std::abs(p.x - upper_.x) <= tol) n += Point{-1.0, 0.0};
        if (std::abs(p.y - lower_.y) <= tol) n += Point{0.0, 1.0};
        if (std::abs(p.y - upper_.y) <= tol) n += Point{0.0, -1.0};
        return (1.0 / norm(n)) * n;
    }
    case DomainKind::Disk: {
        const Point r = p - center_;
        return (-1.0 / norm(r)) * r;
    }
    case DomainKind::Annulus: {
        const Point r = p - center_;
        const double len = norm(r);
        return std::abs(len - r_in_) < std::abs(r_out_ - len) ? (1.0 / len) * r : (-1.0 / len) * r;
    }
    }
    return {};
}

Point Domain::project_to_boundary(Point p) const {
    switch (kind_) {
    case DomainKind::Interval:
        return std::abs(p.x - lower_.x) <= std::abs(upper_.x - p.x) ? Point{lower_.x, 0.0}
                                                                    : Point{upper_.x, 0.0};
    case DomainKind::Rectangle: {
        if (signed_distance(p) <= 0.0)
            return {std::clamp(p.x, lower_.x, upper_.x), std::clamp(p.y, lower_.y, upper_.y)};
        const double d[4] = {p.x - lower_.x, upper_.x - p.x, p.y - lower_.y, upper_.y - p.y};
        const auto side = std::min_element(d, d + 4) - d;
        switch (side) {
        case 0: return {lower_.x, p.y};
        case 1: return {upper_.x, p.y};
        case 2: return {p.x, lower_.y};
        default: return {p.x, upper_.y};
        }
    }
    case DomainKind::Disk:
    case DomainKind::Annulus: {
        const Point r = p - center_;
        const double len = norm(r);
        const Point dir = len > 0.0 ? (1.0 / len) * r : Point{1.0, 0.0};
        double radius = r_out_;
        if (kind_ == DomainKind::Annulus && std::abs(len - r_in_) < std::abs(r_out_ - len)) radius = r_in_;
        return center_ + radius * dir;
    }
    }
    return p;
}

double Domain::boundary_parameter(Point p) const {
    const Point b = project_to_boundary(p);
    switch (kind_) {
    case DomainKind::Interval: return b.x == lower_.x ? 0.0 : 1.0;
    case DomainKind::Rectangle: {
        const double w = upper_.x - lower_.x;
        const double h = upper_.y - lower_.y;
        const double tol = boundary_tolerance();
        if (std::abs(b.y - lower_.y) <= tol && b.x < upper_.x - tol) return b.x - lower_.x;
        if (std::abs(b.x - upper_.x) <= tol && b.y < upper_.y - tol) return w + (b.y - lower_.y);
        if (std::abs(b.y - upper_.y) <= tol && b.x > lower_.x + tol) return w + h + (upper_.x - b.x);
        return std::min(2.0 * w + h + (upper_.y - b.y), 2.0 * (w + h) * (1.0 - 1e-15));
    }
    case DomainKind::Disk: return wrap_angle(std::atan2(b.y - center_.y, b.x - center_.x));
    case DomainKind::Annulus: {
        const double theta = wrap_angle(std::atan2(b.y - center_.y, b.x - center_.x));
        const double r = norm(b - center_);
        return std::abs(r - r_in_) < std::abs(r - r_out_) ? theta + kTwoPi : theta;
    }
    }
    return 0.0;
}

std::pair<double, double> Domain::boundary_parameter_range() const {
    switch (kind_) {
    case DomainKind::Interval: return {0.0, 1.0};
    case DomainKind::Rectangle: return {0.0, boundary_measure()};
    case DomainKind::Disk: return {0.0, kTwoPi};
    case DomainKind::Annulus: return {0.0, 2.0 * kTwoPi};
    }
    return {0.0, 1.0};
}

double BoundaryQuadrature::total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

double InteriorQuadrature::total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

namespace {

void add_circle(BoundaryQuadrature& q, Point center, double radius, int n, double normal_sign) {
    const double w = kTwoPi * radius / n;
    for (int j = 0; j < n; ++j) {
        const double theta = kTwoPi * j / n;
        const Point dir{std::cos(theta), std::sin(theta)};
        q.nodes.push_back(center + radius * dir);
        q.weights.push_back(w);
        q.normals.push_back(normal_sign * dir);
    }
}

void add_edge(BoundaryQuadrature& q, Point a, Point b, Point normal, int n) {
    const double len = norm(b - a);
    for (int j = 0; j < n; ++j) {
        const double t = (j + 0.5) / n;
        q.nodes.push_back(a + t * (b - a));
        q.weights.push_back(len / n);
        q.normals.push_back(normal);
    }
}

} // namespace

BoundaryQuadrature boundary_quadrature(const Domain& domain, int resolution) {
    BoundaryQuadrature q;
    if (domain.kind() == DomainKind::Interval) {
        q.nodes = {domain.lower(), domain.upper()};
        q.weights = {1.0, 1.0};
        q.normals = {{1.0, 0.0}, {-1.0, 0.0}};
        return q;
    }
    if (resolution < 2) throw ConfigError("boundary_quadrature: resolution must be >= 2");
    switch (domain.kind()) {
    case DomainKind::Rectangle: {
        const Point lo = domain.lower();
        const Point hi = domain.upper();
        add_edge(q, lo, {hi.x, lo.y}, {0.0, 1.0}, resolution);
        add_edge(q, {hi.x, lo.y}, hi, {-1.0, 0.0}, resolution);
        add_edge(q, hi, {lo.x, hi.y}, {0.0, -1.0}, resolution);
        add_edge(q, {lo.x, hi.y}, lo, {1.0, 0.0}, resolution);
        break;
    }
    case DomainKind::Disk: add_circle(q, domain.center(), domain.outer_radius(), resolution, -1.0); break;
    case DomainKind::Annulus:
        add_circle(q, domain.center(), domain.outer_radius(), resolution, -1.0);
        add_circle(q, domain.center(), domain.inner_radius(), resolution, 1.0);
        break;
    case DomainKind::Interval: break;
    }
    return q;
}

InteriorQuadrature interior_quadrature(const Domain& domain, int resolution) {
    if (resolution < 2) throw ConfigError("interior_quadrature: resolution must be >= 2");
    InteriorQuadrature q;
    switch (domain.kind()) {
    case DomainKind::Interval: {
        const double lo = domain.lower().x;
        const double h = (domain.upper().x - lo) / (resolution - 1);
        for (int i = 0; i < resolution; ++i) {
            q.nodes.push_back({lo + i * h, 0.0});
            q.weights.push_back((i == 0 || i == resolution - 1) ? 0.5 * h : h);
        }
        break;
    }
    case DomainKind::Rectangle: {
        const Point lo = domain.lower();
        const Point hi = domain.upper();
        const double hx = (hi.x - lo.x) / (resolution - 1);
        const double hy = (hi.y - lo.y) / (resolution - 1);
        for (int j = 0; j < resolution; ++j) {
            const double wy = (j == 0 || j == resolution - 1) ? 0.5 * hy : hy;
            for (int i = 0; i < resolution; ++i) {
                const double wx = (i == 0 || i == resolution - 1) ? 0.5 * hx : hx;
                q.nodes.push_back({lo.x + i * hx, lo.y + j * hy});
                q.weights.push_back(wx * wy);
            }
        }
        break;
    }
    case DomainKind::Disk:
    case DomainKind::Annulus: {
        const double r0 = domain.inner_radius();
        const double dr = (domain.outer_radius() - r0) / resolution;
        const int nt = 4 * resolution;
        const double dt = kTwoPi / nt;
        for (int i = 0; i < resolution; ++i) {
            const double r = r0 + (i + 0.5) * dr;
            for (int j = 0; j < nt; ++j) {
                const double theta = j * dt;
                q.nodes.push_back(domain.center() + r * Point{std::cos(theta), std::sin(theta)});
                q.weights.push_back(r * dr * dt);
            }
        }
        break;
    }
    }
    return q;
}

} // namespace jumpdiff
