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

#include "jumpdiff/theory.hpp"

#include "jumpdiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace jumpdiff {

BoundaryQuadrature default_boundary_quadrature(const Domain& domain) { return boundary_quadrature(domain, 400); }

InteriorQuadrature default_interior_quadrature(const Domain& domain) {
    switch (domain.kind()) {
    case DomainKind::Interval: return interior_quadrature(domain, 100001);
    case DomainKind::Rectangle: return interior_quadrature(domain, 1001);
    default: return interior_quadrature(domain, 500); // 500 x 2000 polar nodes
    }
}

ScalarField order_k_field(const CoefficientSet& coeffs, int k) {
    return apply_L_tilde_power(coeffs, coeffs.mu(), k % 2 == 0 ? k / 2 : (k - 1) / 2);
}

double boundary_density_value(const CoefficientSet& coeffs, int k, const ScalarField& order_k, Point x, Point n) {
    const Mat2 a = coeffs.diffusion().a_at(x);
    const double v_factor = std::pow(coeffs.V()(x), -0.5 * (k + 1));
    const Point an{a.xx * n.x + a.xy * n.y, a.yx * n.x + a.yy * n.y};
    if (k % 2 == 0) return std::sqrt(dot(n, an)) * v_factor * order_k(x);
    // a is symmetric, so (a grad psi) . n = grad psi . (a n)
    Point grad{order_k.eval(x, {1, 0}), 0.0};
    if (coeffs.dimension() == 2) grad.y = order_k.eval(x, {0, 1});
    return v_factor * dot(grad, an);
}

namespace {

// All multi-indices of total order `order` in `dim` dimensions.
std::vector<MultiIndex> indices_of_order(int order, int dim) {
    if (dim == 1) return {{order, 0}};
    std::vector<MultiIndex> out;
    for (int i = order; i >= 0; --i) out.push_back({i, order - i});
    return out;
}

} // namespace

VanishingReport validate_vanishing_order(const CoefficientSet& coeffs, int k, const BoundaryQuadrature& quad,
                                         double tol) {
    VanishingReport report;
    report.k = k;
    const ScalarField& mu = coeffs.mu();
    const int dim = coeffs.dimension();
    if (mu.max_order() < k) {
        report.message =
            "mu provides derivatives to order " + std::to_string(mu.max_order()) + ", need " + std::to_string(k);
        return report;
    }
    if (tol <= 0.0) {
        double scale = 0.0;
        for (int order = 0; order <= k; ++order)
            for (const auto& beta : indices_of_order(order, dim))
                for (const auto& x : quad.nodes) scale = std::max(scale, std::abs(mu.eval(x, beta)));
        tol = std::max(1e-8 * scale, 1e-14);
    }
    report.tolerance = tol;

    for (int order = 0; order < k; ++order) {
        for (const auto& beta : indices_of_order(order, dim)) {
            for (const auto& x : quad.nodes) {
                const double v = std::abs(mu.eval(x, beta));
                if (v > report.max_lower_order) {
                    report.max_lower_order = v;
                    if (v > tol) report.offending_node = x;
                }
            }
        }
    }
    const ScalarField top = order_k_field(coeffs, k);
    report.max_order_k = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < quad.size(); ++i)
        report.max_order_k =
            std::max(report.max_order_k, boundary_density_value(coeffs, k, top, quad.nodes[i], quad.normals[i]));

    std::ostringstream msg;
    if (report.max_lower_order > tol) {
        msg << "derivative of order < " << k << " of mu is " << report.max_lower_order
            << " on the boundary (tolerance " << tol << "); mu does not vanish to order " << k;
    } else if (!(report.max_order_k > tol)) {
        msg << "order-" << k << " boundary quantity is at most " << report.max_order_k << " (tolerance " << tol
            << "); mu vanishes to higher order than " << k;
        if (!quad.nodes.empty()) report.offending_node = quad.nodes.front();
    } else {
        report.pass = true;
        msg << "PASS: mu vanishes to order exactly " << k << " on the boundary";
    }
    report.message = msg.str();
    return report;
}

BoundaryDensity boundary_density(int k, const CoefficientSet& coeffs, const BoundaryQuadrature& quad) {
    const VanishingReport check = validate_vanishing_order(coeffs, k, quad);
    if (!check.pass) throw CoefficientError("boundary_density: " + check.message);
    BoundaryDensity density;
    density.quad = quad;
    density.values.resize(quad.size());
    const ScalarField top = order_k_field(coeffs, k);
    for (std::size_t i = 0; i < quad.size(); ++i) {
        density.values[i] = boundary_density_value(coeffs, k, top, quad.nodes[i], quad.normals[i]);
        density.normalization += quad.weights[i] * density.values[i];
    }
    if (!(density.normalization > 0.0)) throw CoefficientError("boundary density has non-positive mass");
    return density;
}

double phi_zero(const BoundaryDensity& density, const ScalarField& f) {
    if (density.normalization == 0.0) throw CoefficientError("phi_zero: zero normalization constant");
    double num = 0.0;
    for (std::size_t i = 0; i < density.quad.size(); ++i)
        num += density.quad.weights[i] * f(density.quad.nodes[i]) * density.values[i];
    return num / density.normalization;
}

double phi_zero(const CoefficientSet& coeffs, int k, const BoundaryQuadrature& quad) {
    return phi_zero(boundary_density(k, coeffs, quad), coeffs.f());
}

double inverse_V_mass(const CoefficientSet& coeffs, const InteriorQuadrature& iquad) {
    double s = 0.0;
    for (std::size_t i = 0; i < iquad.size(); ++i)
        s += iquad.weights[i] * coeffs.mu()(iquad.nodes[i]) / coeffs.V()(iquad.nodes[i]);
    return s;
}

double local_exit_mass_limit(const CoefficientSet& coeffs, int k, const BoundaryQuadrature& quad) {
    const BoundaryDensity d = boundary_density(k, coeffs, quad);
    return d.normalization * (k % 2 == 0 ? 1.0 / std::numbers::sqrt2 : 0.5);
}

double eigen_prefactor(const CoefficientSet& coeffs, int k, const BoundaryQuadrature& quad,
                       const InteriorQuadrature& iquad) {
    const double denom = inverse_V_mass(coeffs, iquad);
    if (!(denom > 0.0)) throw CoefficientError("eigen_prefactor: integral of mu/V is not positive");
    const BoundaryDensity d = boundary_density(k, coeffs, quad);
    return d.normalization / ((k % 2 == 0 ? std::numbers::sqrt2 : 2.0) * denom);
}

TheoryResult evaluate_theory(const CoefficientSet& coeffs, const BoundaryQuadrature& quad,
                             const InteriorQuadrature& iquad) {
    const int k = coeffs.k();
    const BoundaryDensity d = boundary_density(k, coeffs, quad);
    TheoryResult r;
    r.k = k;
    r.exponent = 0.5 * (k + 1);
    r.phi0 = phi_zero(d, coeffs.f());
    r.boundary_integral = d.normalization;
    r.inverse_V_mass = inverse_V_mass(coeffs, iquad);
    if (!(r.inverse_V_mass > 0.0)) throw CoefficientError("integral of mu/V is not positive");
    r.c_eig = d.normalization / ((k % 2 == 0 ? std::numbers::sqrt2 : 2.0) * r.inverse_V_mass);
    return r;
}

} // namespace jumpdiff
