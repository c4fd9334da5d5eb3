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

#include "jumpdiff/fields.hpp"

#include "jumpdiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace jumpdiff {

namespace detail {

struct FieldNode {
    virtual ~FieldNode() = default;
    virtual double eval(Point x, MultiIndex alpha) const = 0;
    virtual int max_order() const { return kUnlimitedOrder; }
    virtual bool reduced_accuracy() const { return false; }
    /// Non-null for constant nodes.
    virtual const double* constant_value() const { return nullptr; }
};

} // namespace detail

namespace {

using detail::FieldNode;
using NodePtr = std::shared_ptr<const FieldNode>;

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// d^n/dt^n t^p
double power_derivative(double t, int p, int n) {
    if (n > p) return 0.0;
    double c = 1.0;
    for (int i = 0; i < n; ++i) c *= (p - i);
    const int e = p - n;
    double v = 1.0;
    for (int i = 0; i < e; ++i) v *= t;
    return c * v;
}

double int_pow(double t, int n) {
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= t;
    return v;
}

struct ConstantNode final : FieldNode {
    double c;
    explicit ConstantNode(double value) : c(value) {}
    double eval(Point, MultiIndex alpha) const override { return alpha.order() == 0 ? c : 0.0; }
    const double* constant_value() const override { return &c; }
};

struct PolynomialNode final : FieldNode {
    std::vector<Monomial> terms;
    explicit PolynomialNode(std::vector<Monomial> t) : terms(std::move(t)) {}
    double eval(Point x, MultiIndex alpha) const override {
        double s = 0.0;
        for (const auto& m : terms) {
            if (alpha.i > m.px || alpha.j > m.py) continue;
            s += m.coeff * power_derivative(x.x, m.px, alpha.i) * power_derivative(x.y, m.py, alpha.j);
        }
        return s;
    }
};

struct TrigNode final : FieldNode {
    TrigKind kind;
    Point wave;
    double phase;
    double amplitude;
    TrigNode(TrigKind k, Point w, double p, double a) : kind(k), wave(w), phase(p), amplitude(a) {}
    double eval(Point x, MultiIndex alpha) const override {
        // d/dt sin(t) = sin(t + pi/2), likewise for cos
        const double arg = dot(wave, x) + phase + 0.5 * std::numbers::pi * alpha.order();
        const double scale = amplitude * int_pow(wave.x, alpha.i) * int_pow(wave.y, alpha.j);
        return scale * (kind == TrigKind::Sin ? std::sin(arg) : std::cos(arg));
    }
};

struct ExpNode final : FieldNode {
    Point rate;
    double amplitude;
    ExpNode(Point r, double a) : rate(r), amplitude(a) {}
    double eval(Point x, MultiIndex alpha) const override {
        return amplitude * int_pow(rate.x, alpha.i) * int_pow(rate.y, alpha.j) * std::exp(dot(rate, x));
    }
};

struct DistancePowerNode final : FieldNode {
    Domain domain;
    int power;
    DistancePowerNode(Domain d, int p) : domain(std::move(d)), power(p) {}
    int max_order() const override { return 2; }

    // Local gradient and Hessian of the distance to the nearest boundary piece.
    void local_geometry(Point x, Point& grad, Mat2& hess) const {
        hess = {};
        switch (domain.kind()) {
        case DomainKind::Interval:
            grad = (x.x - domain.lower().x) <= (domain.upper().x - x.x) ? Point{1.0, 0.0} : Point{-1.0, 0.0};
            return;
        case DomainKind::Rectangle: {
            const Point lo = domain.lower();
            const Point hi = domain.upper();
            const double d[4] = {x.x - lo.x, hi.x - x.x, x.y - lo.y, hi.y - x.y};
            const Point n[4] = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
            grad = n[std::min_element(d, d + 4) - d];
            return;
        }
        case DomainKind::Disk:
        case DomainKind::Annulus: {
            const Point rv = x - domain.center();
            const double r = norm(rv);
            const Point e = (1.0 / r) * rv;
            const bool inner = domain.kind() == DomainKind::Annulus &&
                               (r - domain.inner_radius()) < (domain.outer_radius() - r);
            const double s = inner ? 1.0 : -1.0;
            grad = s * e;
            hess = {s * (1.0 - e.x * e.x) / r, -s * e.x * e.y / r, -s * e.x * e.y / r, s * (1.0 - e.y * e.y) / r};
            return;
        }
        }
    }

    double eval(Point x, MultiIndex alpha) const override {
        const double d = domain.signed_distance(x);
        const int m = power;
        if (alpha.order() == 0) return int_pow(d, m);
        Point g;
        Mat2 h;
        local_geometry(x, g, h);
        const double d1 = m >= 1 ? m * int_pow(d, m - 1) : 0.0;
        if (alpha.order() == 1) return d1 * (alpha.i == 1 ? g.x : g.y);
        const double d2 = m >= 2 ? m * (m - 1) * int_pow(d, m - 2) : 0.0;
        if (alpha.i == 2) return d2 * g.x * g.x + d1 * h.xx;
        if (alpha.j == 2) return d2 * g.y * g.y + d1 * h.yy;
        return d2 * g.x * g.y + d1 * h.xy;
    }
};

struct BlackBoxNode final : FieldNode {
    std::function<double(Point)> fn;
    Domain domain;
    double step;
    BlackBoxNode(std::function<double(Point)> f, Domain d)
        : fn(std::move(f)), domain(std::move(d)), step(1e-5 * domain.diameter()) {}
    int max_order() const override { return 2; }
    bool reduced_accuracy() const override { return true; }

    bool usable(Point p) const { return domain.signed_distance(p) >= -domain.boundary_tolerance(); }

    // Second-order stencil along `axis` for derivative order n (1 or 2) of g.
    template <class G>
    double axis_derivative(Point x, int axis, int n, const G& g) const {
        Point e{};
        e[axis] = step;
        const double h = step;
        const bool fwd_ok = usable(x + e) && usable(x + 2.0 * e);
        const bool bwd_ok = usable(x - e) && usable(x - 2.0 * e);
        if (usable(x + e) && usable(x - e)) {
            if (n == 1) return (g(x + e) - g(x - e)) / (2.0 * h);
            return (g(x + e) - 2.0 * g(x) + g(x - e)) / (h * h);
        }
        const double s = fwd_ok || !bwd_ok ? 1.0 : -1.0;
        const Point se = s * e;
        if (n == 1) return s * (-3.0 * g(x) + 4.0 * g(x + se) - g(x + 2.0 * se)) / (2.0 * h);
        return (2.0 * g(x) - 5.0 * g(x + se) + 4.0 * g(x + 2.0 * se) - g(x + 3.0 * se)) / (h * h);
    }

    double eval(Point x, MultiIndex alpha) const override {
        switch (alpha.order()) {
        case 0: return fn(x);
        case 1: return axis_derivative(x, alpha.i == 1 ? 0 : 1, 1, fn);
        default:
            if (alpha.i == 2) return axis_derivative(x, 0, 2, fn);
            if (alpha.j == 2) return axis_derivative(x, 1, 2, fn);
            return axis_derivative(x, 0, 1, [&](Point p) { return axis_derivative(p, 1, 1, fn); });
        }
    }
};

struct SumNode final : FieldNode {
    std::vector<ScalarField> terms;
    int order = kUnlimitedOrder;
    bool reduced = false;
    explicit SumNode(std::vector<ScalarField> t) : terms(std::move(t)) {
        for (const auto& f : terms) {
            order = std::min(order, f.max_order());
            reduced = reduced || f.reduced_accuracy();
        }
    }
    int max_order() const override { return order; }
    bool reduced_accuracy() const override { return reduced; }
    double eval(Point x, MultiIndex alpha) const override {
        double s = 0.0;
        for (const auto& f : terms) s += f.eval(x, alpha);
        return s;
    }
};

struct ScaleNode final : FieldNode {
    double s;
    ScalarField f;
    ScaleNode(double scale, ScalarField field) : s(scale), f(std::move(field)) {}
    int max_order() const override { return f.max_order(); }
    bool reduced_accuracy() const override { return f.reduced_accuracy(); }
    double eval(Point x, MultiIndex alpha) const override { return s * f.eval(x, alpha); }
};

struct ProductNode final : FieldNode {
    ScalarField f, g;
    ProductNode(ScalarField a, ScalarField b) : f(std::move(a)), g(std::move(b)) {}
    int max_order() const override { return std::min(f.max_order(), g.max_order()); }
    bool reduced_accuracy() const override { return f.reduced_accuracy() || g.reduced_accuracy(); }
    double eval(Point x, MultiIndex alpha) const override {
        if (alpha.order() == 0) return f(x) * g(x);
        double s = 0.0;
        for (int p = 0; p <= alpha.i; ++p) {
            for (int q = 0; q <= alpha.j; ++q) {
                const double c = binomial(alpha.i, p) * binomial(alpha.j, q);
                s += c * f.eval(x, {p, q}) * g.eval(x, {alpha.i - p, alpha.j - q});
            }
        }
        return s;
    }
};

struct DerivativeNode final : FieldNode {
    ScalarField f;
    MultiIndex shift;
    DerivativeNode(ScalarField field, MultiIndex s) : f(std::move(field)), shift(s) {}
    int max_order() const override {
        return f.max_order() >= kUnlimitedOrder ? kUnlimitedOrder : f.max_order() - shift.order();
    }
    bool reduced_accuracy() const override { return f.reduced_accuracy(); }
    double eval(Point x, MultiIndex alpha) const override { return f.eval(x, alpha + shift); }
};

} // namespace

ScalarField::ScalarField() : node_(std::make_shared<ConstantNode>(0.0)) {}

ScalarField ScalarField::constant(double c) { return ScalarField(std::make_shared<ConstantNode>(c)); }

ScalarField ScalarField::polynomial(std::vector<Monomial> terms) {
    for (const auto& m : terms)
        if (m.px < 0 || m.py < 0) throw ConfigError("polynomial: negative exponent");
    if (terms.size() == 1 && terms[0].px == 0 && terms[0].py == 0) return constant(terms[0].coeff);
    return ScalarField(std::make_shared<PolynomialNode>(std::move(terms)));
}

ScalarField ScalarField::trig(TrigKind kind, Point wave, double phase, double amplitude) {
    return ScalarField(std::make_shared<TrigNode>(kind, wave, phase, amplitude));
}

ScalarField ScalarField::exponential(Point rate, double amplitude) {
    return ScalarField(std::make_shared<ExpNode>(rate, amplitude));
}

ScalarField ScalarField::distance_power(const Domain& domain, int power) {
    if (power < 0) throw ConfigError("distance_power: negative power");
    if (power == 0) return constant(1.0);
    return ScalarField(std::make_shared<DistancePowerNode>(domain, power));
}

ScalarField ScalarField::black_box(std::function<double(Point)> fn, const Domain& domain) {
    return ScalarField(std::make_shared<BlackBoxNode>(std::move(fn), domain));
}

double ScalarField::operator()(Point x) const { return node_->eval(x, {}); }

double ScalarField::eval(Point x, MultiIndex alpha) const {
    if (alpha.order() > node_->max_order())
        throw DerivativeOrderError("field derivative of order " + std::to_string(alpha.order()) +
                                   " requested, declared order is " + std::to_string(node_->max_order()));
    return node_->eval(x, alpha);
}

int ScalarField::max_order() const { return node_->max_order(); }
bool ScalarField::is_constant() const { return node_->constant_value() != nullptr; }
bool ScalarField::reduced_accuracy() const { return node_->reduced_accuracy(); }

ScalarField ScalarField::derivative(MultiIndex alpha) const {
    if (alpha.order() == 0) return *this;
    if (alpha.order() > max_order())
        throw DerivativeOrderError("cannot differentiate field of order " + std::to_string(max_order()) + " " +
                                   std::to_string(alpha.order()) + " times");
    if (is_constant()) return constant(0.0);
    if (auto d = std::dynamic_pointer_cast<const DerivativeNode>(node_))
        return ScalarField(std::make_shared<DerivativeNode>(d->f, d->shift + alpha));
    return ScalarField(std::make_shared<DerivativeNode>(*this, alpha));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    const double* ca = a.node_->constant_value();
    const double* cb = b.node_->constant_value();
    if (ca && cb) return ScalarField::constant(*ca + *cb);
    if (ca && *ca == 0.0) return b;
    if (cb && *cb == 0.0) return a;
    std::vector<ScalarField> terms;
    for (const ScalarField* f : {&a, &b}) {
        if (auto s = std::dynamic_pointer_cast<const SumNode>(f->node_))
            terms.insert(terms.end(), s->terms.begin(), s->terms.end());
        else
            terms.push_back(*f);
    }
    return ScalarField(std::make_shared<SumNode>(std::move(terms)));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) { return a + (-1.0) * b; }

ScalarField operator*(double s, const ScalarField& f) {
    if (const double* c = f.node_->constant_value()) return ScalarField::constant(s * *c);
    if (s == 1.0) return f;
    if (s == 0.0) return ScalarField::constant(0.0);
    if (auto sc = std::dynamic_pointer_cast<const ScaleNode>(f.node_)) return (s * sc->s) * sc->f;
    return ScalarField(std::make_shared<ScaleNode>(s, f));
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    if (const double* c = a.node_->constant_value()) return *c * b;
    if (const double* c = b.node_->constant_value()) return *c * a;
    return ScalarField(std::make_shared<ProductNode>(a, b));
}

// ---------------------------------------------------------------------------

MatrixField MatrixField::isotropic(int dim, ScalarField alpha, std::array<ScalarField, 2> drift) {
    if (dim != 1 && dim != 2) throw ConfigError("MatrixField: dimension must be 1 or 2");
    MatrixField m;
    m.dim_ = dim;
    m.a11_ = alpha;
    m.a12_ = ScalarField::constant(0.0);
    m.a22_ = dim == 2 ? alpha : ScalarField::constant(0.0);
    m.b_ = drift;
    if (dim == 1) m.b_[1] = ScalarField::constant(0.0);
    return m;
}

MatrixField MatrixField::general(ScalarField a11, ScalarField a12, ScalarField a22, std::array<ScalarField, 2> drift) {
    MatrixField m;
    m.dim_ = 2;
    m.a11_ = std::move(a11);
    m.a12_ = std::move(a12);
    m.a22_ = std::move(a22);
    m.b_ = drift;
    return m;
}

const ScalarField& MatrixField::a(int i, int j) const {
    if (i == 0 && j == 0) return a11_;
    if (i == 1 && j == 1) return a22_;
    return a12_;
}

Mat2 MatrixField::a_at(Point x) const {
    if (dim_ == 1) return {a11_(x), 0.0, 0.0, 0.0};
    const double off = a12_(x);
    return {a11_(x), off, off, a22_(x)};
}

Point MatrixField::b_at(Point x) const { return dim_ == 1 ? Point{b_[0](x), 0.0} : Point{b_[0](x), b_[1](x)}; }

bool MatrixField::constant_diffusion() const {
    return a11_.is_constant() && a12_.is_constant() && a22_.is_constant();
}

bool MatrixField::zero_drift() const {
    for (const auto& bi : b_)
        if (!bi.is_constant() || bi(Point{}) != 0.0) return false;
    return true;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Point> closure_sample(const Domain& domain) {
    std::vector<Point> pts;
    const int res = domain.dimension() == 1 ? 401 : 41;
    for (const auto& p : interior_quadrature(domain, res).nodes) pts.push_back(p);
    for (const auto& p : boundary_quadrature(domain, 64).nodes) pts.push_back(p);
    return pts;
}

} // namespace

CoefficientSet::CoefficientSet(const Domain& domain, MatrixField diffusion, ScalarField V, ScalarField mu,
                               ScalarField f, int k, CoefficientChecks checks)
    : diffusion_(std::move(diffusion)), V_(std::move(V)), mu_(std::move(mu)), f_(std::move(f)), k_(k) {
    if (diffusion_.dimension() != domain.dimension())
        throw CoefficientError("coefficient dimension does not match the domain");
    if (k_ < 0) throw CoefficientError("vanishing order k must be >= 0");
    const int dim = dimension();
    for (const Point& p : closure_sample(domain)) {
        const Mat2 a = diffusion_.a_at(p);
        const bool spd = dim == 1 ? a.xx > 0.0 : (a.xx > 0.0 && a.xx * a.yy - a.xy * a.yx > 0.0);
        if (!spd) throw CoefficientError("diffusion matrix is not positive definite at a sample point");
        const double v = V_(p);
        if (checks.require_positive_V ? !(v > 0.0) : !(v >= 0.0))
            throw CoefficientError("jump intensity V must be positive on the closure of D");
        if (mu_(p) < 0.0) throw CoefficientError("mu density is negative at a sample point");
    }
    if (checks.require_normalized_mu) {
        const int res = dim == 1 ? 20001 : (domain.kind() == DomainKind::Rectangle ? 801 : 400);
        const auto q = interior_quadrature(domain, res);
        double mass = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) mass += q.weights[i] * mu_(q.nodes[i]);
        if (std::abs(mass - 1.0) > checks.mu_mass_tolerance)
            throw CoefficientError("mu density integrates to " + std::to_string(mass) + ", expected 1");
    }
}

CoefficientSet CoefficientSet::with_drift(const Domain& domain, std::array<ScalarField, 2> drift) const {
    MatrixField m = dimension() == 1
                        ? MatrixField::isotropic(1, diffusion_.a(0, 0), drift)
                        : MatrixField::general(diffusion_.a(0, 0), diffusion_.a(0, 1), diffusion_.a(1, 1), drift);
    CoefficientChecks c;
    c.require_normalized_mu = false;
    c.require_positive_V = false;
    return CoefficientSet(domain, std::move(m), V_, mu_, f_, k_, c);
}

CoefficientSet CoefficientSet::with_mu(const Domain& domain, ScalarField mu, CoefficientChecks checks) const {
    return CoefficientSet(domain, diffusion_, V_, std::move(mu), f_, k_, checks);
}

CoefficientSet CoefficientSet::with_V(const Domain& domain, ScalarField V, CoefficientChecks checks) const {
    return CoefficientSet(domain, diffusion_, std::move(V), mu_, f_, k_, checks);
}

CoefficientSet CoefficientSet::with_f(ScalarField f) const {
    CoefficientSet c = *this;
    c.f_ = std::move(f);
    return c;
}

bool CoefficientSet::reduced_accuracy() const {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (diffusion_.a(i, j).reduced_accuracy()) return true;
    return diffusion_.b(0).reduced_accuracy() || diffusion_.b(1).reduced_accuracy() || V_.reduced_accuracy() ||
           mu_.reduced_accuracy() || f_.reduced_accuracy();
}

// ---------------------------------------------------------------------------

namespace {

void require_order(const ScalarField& f, int needed, const char* what) {
    if (f.max_order() < needed)
        throw DerivativeOrderError(std::string(what) + ": argument has derivative order " +
                                   std::to_string(f.max_order()) + ", needs " + std::to_string(needed));
}

// 1/2 sum_ij d_i(a_ij d_j phi)
ScalarField half_divergence_form(const MatrixField& m, const ScalarField& phi) {
    const int dim = m.dimension();
    ScalarField out = ScalarField::constant(0.0);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const ScalarField& aij = m.a(i, j);
            out = out + 0.5 * (aij.derivative(unit_index(i)) * phi.derivative(unit_index(j)) +
                               aij * phi.derivative(unit_index(i) + unit_index(j)));
        }
    }
    return out;
}

} // namespace

ScalarField apply_L(const MatrixField& m, const ScalarField& phi) {
    require_order(phi, 2, "apply_L");
    ScalarField out = half_divergence_form(m, phi);
    for (int i = 0; i < m.dimension(); ++i) out = out + m.b(i) * phi.derivative(unit_index(i));
    return out;
}

ScalarField apply_L(const CoefficientSet& coeffs, const ScalarField& phi) { return apply_L(coeffs.diffusion(), phi); }

ScalarField apply_L_tilde(const MatrixField& m, const ScalarField& psi) {
    require_order(psi, 2, "apply_L_tilde");
    ScalarField out = half_divergence_form(m, psi);
    for (int i = 0; i < m.dimension(); ++i) {
        out = out - m.b(i) * psi.derivative(unit_index(i));
        out = out - m.b(i).derivative(unit_index(i)) * psi;
    }
    return out;
}

ScalarField apply_L_tilde(const CoefficientSet& coeffs, const ScalarField& psi) {
    return apply_L_tilde(coeffs.diffusion(), psi);
}

ScalarField apply_L_tilde_power(const CoefficientSet& coeffs, const ScalarField& psi, int m) {
    if (m < 0) throw ConfigError("apply_L_tilde_power: negative power");
    require_order(psi, 2 * m, "apply_L_tilde_power");
    ScalarField out = psi;
    for (int i = 0; i < m; ++i) out = apply_L_tilde(coeffs, out);
    return out;
}

std::array<ScalarField, 2> nondivergence_drift(const MatrixField& m) {
    std::array<ScalarField, 2> B{};
    for (int j = 0; j < m.dimension(); ++j) {
        ScalarField s = m.b(j);
        for (int i = 0; i < m.dimension(); ++i) s = s + 0.5 * m.a(i, j).derivative(unit_index(i));
        B[j] = s;
    }
    return B;
}

std::array<ScalarField, 2> nondivergence_drift(const CoefficientSet& coeffs) {
    return nondivergence_drift(coeffs.diffusion());
}

Mat2 cholesky(const Mat2& a, int dim) {
    if (!(a.xx > 0.0)) throw CoefficientError("diffusion matrix is not positive definite");
    const double l11 = std::sqrt(a.xx);
    if (dim == 1) return {l11, 0.0, 0.0, 0.0};
    const double l21 = a.yx / l11;
    const double rest = a.yy - l21 * l21;
    if (!(rest > 0.0)) throw CoefficientError("diffusion matrix is not positive definite");
    return {l11, 0.0, l21, std::sqrt(rest)};
}

Mat2 diffusion_root(const CoefficientSet& coeffs, Point x) {
    return cholesky(coeffs.diffusion().a_at(x), coeffs.dimension());
}

} // namespace jumpdiff
