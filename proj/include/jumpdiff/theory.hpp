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

#include <optional>
#include <string>
#include <vector>

namespace jumpdiff {

/// Unnormalized limiting exit density at each boundary quadrature node.
///
/// For even k the value at x is sqrt(n.a n) V^{-(k+1)/2} (Lt^{k/2} mu), for
/// odd k it is V^{-(k+1)/2} (a grad(Lt^{(k-1)/2} mu)) . n, with n the inward
/// normal and Lt the formal adjoint of L.
struct BoundaryDensity {
    BoundaryQuadrature quad;
    std::vector<double> values;
    double normalization = 0.0; ///< sum of weights * values

    /// Probability density e_0^k at node i (values / normalization).
    double normalized(std::size_t i) const { return values[i] / normalization; }
};

struct TheoryResult {
    int k = 0;
    double exponent = 0.5; ///< (k+1)/2
    double phi0 = 0.0;     ///< limit of the exit functional for the coefficient set's f
    double c_eig = 0.0;    ///< lambda_0(delta) ~ c_eig * delta^exponent
    double boundary_integral = 0.0;
    double inverse_V_mass = 0.0; ///< integral of mu / V over D
};

struct VanishingReport {
    bool pass = false;
    int k = 0;
    double tolerance = 0.0;
    /// Largest |d^beta mu| over nodes and |beta| <= k-1 (0 when k == 0).
    double max_lower_order = 0.0;
    /// Largest order-k boundary quantity over nodes.
    double max_order_k = 0.0;
    /// Node responsible for the failure, if any.
    std::optional<Point> offending_node;
    std::string message;
};

/// Boundary quadrature with 400 nodes per smooth component.
BoundaryQuadrature default_boundary_quadrature(const Domain& domain);
/// 1e5 trapezoid nodes in 1D, about 1e6 nodes in 2D.
InteriorQuadrature default_interior_quadrature(const Domain& domain);

/// tol <= 0 selects the default, 1e-8 times the scale of mu's derivatives
/// up to order k on the boundary.
VanishingReport validate_vanishing_order(const CoefficientSet& coeffs, int k, const BoundaryQuadrature& quad,
                                         double tol = 0.0);

/// Field whose boundary trace enters the order-k density: Lt^{k/2} mu for even
/// k, Lt^{(k-1)/2} mu for odd k (the latter still needs a grad . n).
ScalarField order_k_field(const CoefficientSet& coeffs, int k);

/// Density value at one boundary point with inward normal n.
double boundary_density_value(const CoefficientSet& coeffs, int k, const ScalarField& order_k, Point x, Point n);

/// Throws CoefficientError if validate_vanishing_order fails for k.
BoundaryDensity boundary_density(int k, const CoefficientSet& coeffs, const BoundaryQuadrature& quad);

/// Ratio of boundary integrals of f e and e. Throws when the normalization vanishes.
double phi_zero(const CoefficientSet& coeffs, int k, const BoundaryQuadrature& quad);
double phi_zero(const BoundaryDensity& density, const ScalarField& f);

/// C with lambda_0(delta) ~ C delta^{(k+1)/2}: the boundary integral of the
/// density over sqrt(2) (even k) or 2 (odd k) times the integral of mu / V.
double eigen_prefactor(const CoefficientSet& coeffs, int k, const BoundaryQuadrature& quad,
                       const InteriorQuadrature& iquad);

/// Limit of delta^{-(k+1)/2} times the integral of u_{delta,V} d mu: the boundary
/// integral of the density times 1/sqrt(2) (even k) or 1/2 (odd k).
double local_exit_mass_limit(const CoefficientSet& coeffs, int k, const BoundaryQuadrature& quad);

/// Integral of mu / V over D.
double inverse_V_mass(const CoefficientSet& coeffs, const InteriorQuadrature& iquad);

TheoryResult evaluate_theory(const CoefficientSet& coeffs, const BoundaryQuadrature& quad,
                             const InteriorQuadrature& iquad);

} // namespace jumpdiff
