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

#include "jumpdiff/point.hpp"

#include <string>
#include <vector>

namespace jumpdiff {

enum class DomainKind { Interval, Rectangle, Disk, Annulus };

std::string to_string(DomainKind kind);

/// Bounded domain D. Only shapes with exact distances and normals are
/// supported: interval, axis-aligned rectangle, disk, annulus.
class Domain {
public:
    static Domain interval(double lo, double hi);
    static Domain rectangle(Point lower, Point upper);
    static Domain disk(Point center, double radius);
    static Domain annulus(Point center, double inner_radius, double outer_radius);

    DomainKind kind() const { return kind_; }
    int dimension() const { return kind_ == DomainKind::Interval ? 1 : 2; }

    /// Interval: (lo, hi). Rectangle: lower corner, upper corner.
    Point lower() const { return lower_; }
    Point upper() const { return upper_; }
    /// Disk and annulus.
    Point center() const { return center_; }
    double inner_radius() const { return r_in_; }
    double outer_radius() const { return r_out_; }

    double diameter() const;
    /// |D| (length in 1D, area in 2D).
    double measure() const;
    /// sigma(dD): 2 in 1D (counting measure), perimeter in 2D.
    double boundary_measure() const;
    /// Axis-aligned bounding box of the closure.
    std::pair<Point, Point> bounding_box() const;

    /// Absolute tolerance used to decide membership of the boundary.
    double boundary_tolerance() const { return 1e-9 * diameter(); }

    /// Positive inside, zero on the boundary, negative outside.
    double signed_distance(Point p) const;
    bool contains(Point p) const { return signed_distance(p) > 0.0; }
    bool on_boundary(Point p) const;

    /// Inward unit normal at a boundary point. Throws BoundaryToleranceError
    /// off the boundary. At a rectangle corner returns the normalized bisector.
    Point inward_normal(Point p) const;

    /// Nearest point of the boundary.
    Point project_to_boundary(Point p) const;

    /// Scalar coordinate along the boundary used for exit-law histograms:
    ///   interval   0 at lo, 1 at hi
    ///   rectangle  arc length counter-clockwise from the lower corner, [0, perimeter)
    ///   disk       polar angle in [0, 2 pi)
    ///   annulus    outer angle in [0, 2 pi), inner angle + 2 pi in [2 pi, 4 pi)
    double boundary_parameter(Point p) const;
    /// Range of boundary_parameter.
    std::pair<double, double> boundary_parameter_range() const;

private:
    DomainKind kind_ = DomainKind::Interval;
    Point lower_{};
    Point upper_{};
    Point center_{};
    double r_in_ = 0.0;
    double r_out_ = 0.0;
};

struct BoundaryQuadrature {
    std::vector<Point> nodes;
    std::vector<double> weights;
    std::vector<Point> normals;

    std::size_t size() const { return nodes.size(); }
    double total_weight() const;
};

struct InteriorQuadrature {
    std::vector<Point> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double total_weight() const;
};

/// Nodes on every boundary component. `resolution` is the node count per
/// circle or per rectangle edge (midpoint rule, corners excluded); it is
/// ignored for the interval, whose boundary measure is counting measure.
BoundaryQuadrature boundary_quadrature(const Domain& domain, int resolution);

/// Trapezoid rule (interval), tensor trapezoid (rectangle), or polar midpoint
/// rule in r with uniform angles (disk, annulus). `resolution` is the node
/// count per axis.
InteriorQuadrature interior_quadrature(const Domain& domain, int resolution);

} // namespace jumpdiff
