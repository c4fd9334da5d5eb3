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

#include "jumpdiff/geometry.hpp"
#include "jumpdiff/point.hpp"

#include <array>
#include <functional>
#include <memory>
#include <vector>

namespace jumpdiff {

namespace detail {
struct FieldNode;
}

/// Sentinel derivative order for analytic fields.
inline constexpr int kUnlimitedOrder = 1 << 20;

struct Monomial {
    double coeff = 0.0;
    int px = 0; ///< power of x
    int py = 0; ///< power of y
};

enum class TrigKind { Sin, Cos };

/// Immutable scalar field on R^d with analytic partial derivatives up to a
/// declared order. Cheap to copy (shared expression tree).
///
/// Builtins carry closed-form partials; sums and products propagate them by
/// linearity and the Leibniz rule, so operator compositions such as
/// apply_L_tilde_power are exact up to roundoff. Only black_box fields use
/// finite differences and they report reduced_accuracy().
class ScalarField {
public:
    ScalarField();

    static ScalarField constant(double c);
    static ScalarField polynomial(std::vector<Monomial> terms);
    /// amplitude * sin|cos(wave . x + phase)
    static ScalarField trig(TrigKind kind, Point wave, double phase, double amplitude = 1.0);
    /// amplitude * exp(rate . x)
    static ScalarField exponential(Point rate, double amplitude = 1.0);
    /// dist(x, dD)^power using the signed distance of `domain`. Derivatives
    /// are those of the nearest boundary piece; declared order is 2.
    static ScalarField distance_power(const Domain& domain, int power);
    /// User-supplied callback. Derivatives up to order 2 by finite
    /// differences (central, one-sided near dD, step 1e-5 * diameter).
    static ScalarField black_box(std::function<double(Point)> fn, const Domain& domain);

    double operator()(Point x) const;
    /// Partial derivative d^alpha at x. Throws DerivativeOrderError when
    /// alpha.order() > max_order().
    double eval(Point x, MultiIndex alpha) const;
    int max_order() const;
    bool is_constant() const;
    bool reduced_accuracy() const;

    /// The field d^alpha f as a new field of order max_order() - |alpha|.
    ScalarField derivative(MultiIndex alpha) const;

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(double s, const ScalarField& f);
    friend ScalarField operator-(const ScalarField& f) { return -1.0 * f; }

private:
    explicit ScalarField(std::shared_ptr<const detail::FieldNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const detail::FieldNode> node_;
};

/// Dense 2x2 matrix, row major. 1D problems use only xx.
struct Mat2 {
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
};

/// Diffusion matrix a (symmetric) and drift b.
class MatrixField {
public:
    MatrixField() = default;
    /// a = alpha * I, b as given (only b[0] used in 1D).
    static MatrixField isotropic(int dim, ScalarField alpha, std::array<ScalarField, 2> drift = {});
    /// Full symmetric a = [[a11, a12], [a12, a22]].
    static MatrixField general(ScalarField a11, ScalarField a12, ScalarField a22,
                               std::array<ScalarField, 2> drift = {});

    int dimension() const { return dim_; }
    const ScalarField& a(int i, int j) const;
    const ScalarField& b(int i) const { return b_[i]; }

    Mat2 a_at(Point x) const;
    Point b_at(Point x) const;
    /// True when every entry of a is constant (skips per-step work in the simulator).
    bool constant_diffusion() const;
    bool zero_drift() const;

private:
    int dim_ = 1;
    ScalarField a11_, a12_, a22_;
    std::array<ScalarField, 2> b_{};
};

struct CoefficientChecks {
    bool require_positive_V = true;  ///< relaxed only by the vanishing-V probe
    bool require_normalized_mu = true;
    double mu_mass_tolerance = 1e-6;
};

/// a, b, V, mu, f and the declared vanishing order k of mu at dD.
class CoefficientSet {
public:
    /// Validates on construction over a sample of the closure of `domain`:
    /// a SPD, V > 0, mu >= 0, integral of mu == 1. Throws CoefficientError.
    CoefficientSet(const Domain& domain, MatrixField diffusion, ScalarField V, ScalarField mu, ScalarField f,
                   int k, CoefficientChecks checks = {});

    int dimension() const { return diffusion_.dimension(); }
    const MatrixField& diffusion() const { return diffusion_; }
    const ScalarField& V() const { return V_; }
    const ScalarField& mu() const { return mu_; }
    const ScalarField& f() const { return f_; }
    int k() const { return k_; }

    CoefficientSet with_drift(const Domain& domain, std::array<ScalarField, 2> drift) const;
    CoefficientSet with_mu(const Domain& domain, ScalarField mu, CoefficientChecks checks) const;
    CoefficientSet with_f(ScalarField f) const;
    CoefficientSet with_V(const Domain& domain, ScalarField V, CoefficientChecks checks) const;
    /// Any field relies on finite-difference derivatives.
    bool reduced_accuracy() const;

private:
    CoefficientSet() = default;
    MatrixField diffusion_;
    ScalarField V_, mu_, f_;
    int k_ = 0;
};

/// 1/2 div(a grad phi) + b . grad phi
ScalarField apply_L(const MatrixField& coeffs, const ScalarField& phi);
ScalarField apply_L(const CoefficientSet& coeffs, const ScalarField& phi);

/// 1/2 div(a grad psi) - b . grad psi - (div b) psi
ScalarField apply_L_tilde(const MatrixField& coeffs, const ScalarField& psi);
ScalarField apply_L_tilde(const CoefficientSet& coeffs, const ScalarField& psi);

/// m-fold composition of apply_L_tilde; m = 0 returns psi.
ScalarField apply_L_tilde_power(const CoefficientSet& coeffs, const ScalarField& psi, int m);

/// B_j = b_j + 1/2 sum_i d_i a_ij, the drift of the diffusion in
/// non-divergence form.
std::array<ScalarField, 2> nondivergence_drift(const MatrixField& coeffs);
std::array<ScalarField, 2> nondivergence_drift(const CoefficientSet& coeffs);

/// Lower-triangular sigma with sigma sigma^T = a(x). Throws CoefficientError
/// when a(x) is not positive definite.
Mat2 diffusion_root(const CoefficientSet& coeffs, Point x);
Mat2 cholesky(const Mat2& a, int dim);

} // namespace jumpdiff
