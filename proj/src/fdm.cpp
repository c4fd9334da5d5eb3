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

#include "jumpdiff/fdm.hpp"

#include "jumpdiff/error.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace jumpdiff {

namespace {

constexpr double kCoreFraction = 1e-3;

} // namespace

Grid Grid::make(const Domain& domain, int n1, int n2) {
    if (n1 < 2) throw ConfigError("grid: need at least 2 cells along each axis");
    Grid g;
    g.domain_ = domain;
    g.n1_ = n1;
    switch (domain.kind()) {
    case DomainKind::Interval:
        g.kind_ = GridKind::Cartesian1D;
        g.n2_ = 0;
        g.q1_lo_ = domain.lower().x;
        g.h1_ = (domain.upper().x - domain.lower().x) / n1;
        break;
    case DomainKind::Rectangle:
        g.kind_ = GridKind::Cartesian2D;
        g.n2_ = n2 > 0 ? n2 : n1;
        if (g.n2_ < 2) throw ConfigError("grid: need at least 2 cells along each axis");
        g.q1_lo_ = domain.lower().x;
        g.q2_lo_ = domain.lower().y;
        g.h1_ = (domain.upper().x - domain.lower().x) / n1;
        g.h2_ = (domain.upper().y - domain.lower().y) / g.n2_;
        break;
    case DomainKind::Disk:
    case DomainKind::Annulus: {
        g.kind_ = GridKind::Polar;
        g.n2_ = n2 > 0 ? n2 : std::min(4 * n1, 512);
        if (g.n2_ < 8) throw ConfigError("grid: polar grids need at least 8 angular nodes");
        const double R = domain.outer_radius();
        g.reflecting_core_ = domain.kind() == DomainKind::Disk;
        g.q1_lo_ = g.reflecting_core_ ? kCoreFraction * R : domain.inner_radius();
        g.h1_ = (R - g.q1_lo_) / n1;
        g.q2_lo_ = 0.0;
        g.h2_ = 2.0 * std::numbers::pi / g.n2_;
        break;
    }
    }

    const int rows = g.kind_ == GridKind::Cartesian1D ? 1 : (g.kind_ == GridKind::Polar ? g.n2_ : g.n2_ + 1);
    const std::size_t count = static_cast<std::size_t>(n1 + 1) * static_cast<std::size_t>(rows);
    g.is_boundary_.assign(count, false);
    g.unknown_.assign(count, -1);
    for (std::size_t p = 0; p < count; ++p) {
        const int i = g.index1(p);
        const int j = g.index2(p);
        bool bnd = false;
        switch (g.kind_) {
        case GridKind::Cartesian1D: bnd = i == 0 || i == n1; break;
        case GridKind::Cartesian2D: bnd = i == 0 || i == n1 || j == 0 || j == g.n2_; break;
        case GridKind::Polar: bnd = i == n1 || (i == 0 && !g.reflecting_core_); break;
        }
        g.is_boundary_[p] = bnd;
        if (bnd) {
            g.boundary_.push_back(p);
        } else {
            g.unknown_[p] = static_cast<long>(g.interior_.size());
            g.interior_.push_back(p);
        }
    }
    return g;
}

double Grid::normal_spacing() const {
    return kind_ == GridKind::Cartesian2D ? std::max(h1_, h2_) : h1_;
}

Point Grid::coord(std::size_t node) const {
    const double a = q1(index1(node));
    switch (kind_) {
    case GridKind::Cartesian1D: return {a, 0.0};
    case GridKind::Cartesian2D: return {a, q2(index2(node))};
    case GridKind::Polar: {
        const double t = q2(index2(node));
        return {domain_.center().x + a * std::cos(t), domain_.center().y + a * std::sin(t)};
    }
    }
    return {};
}

std::vector<double> Grid::volume_weights() const {
    std::vector<double> w(node_count());
    auto trap = [](int i, int n, double h) { return (i == 0 || i == n) ? 0.5 * h : h; };
    for (std::size_t p = 0; p < w.size(); ++p) {
        const int i = index1(p);
        const int j = index2(p);
        switch (kind_) {
        case GridKind::Cartesian1D: w[p] = trap(i, n1_, h1_); break;
        case GridKind::Cartesian2D: w[p] = trap(i, n1_, h1_) * trap(j, n2_, h2_); break;
        case GridKind::Polar: w[p] = q1(i) * trap(i, n1_, h1_) * h2_; break;
        }
    }
    return w;
}

Grid boundary_layer_grid(const Domain& domain, const CoefficientSet& coeffs, double delta, double factor,
                         int min_cells, int angular) {
    if (!(delta > 0.0) || !(factor > 0.0)) throw ConfigError("boundary_layer_grid: delta and factor must be positive");
    // Coarse scan for the extreme coefficients.
    const Grid probe = Grid::make(domain, 64, domain.dimension() == 1 ? 0 : 64);
    double a_min = std::numeric_limits<double>::infinity();
    double v_max = 0.0;
    for (std::size_t p = 0; p < probe.node_count(); ++p) {
        const Point x = probe.coord(p);
        const Mat2 a = coeffs.diffusion().a_at(x);
        const double lam = coeffs.dimension() == 1
                               ? a.xx
                               : 0.5 * (a.xx + a.yy) - std::sqrt(0.25 * (a.xx - a.yy) * (a.xx - a.yy) + a.xy * a.yx);
        a_min = std::min(a_min, lam);
        v_max = std::max(v_max, coeffs.V()(x));
    }
    double extent = 0.0;
    switch (domain.kind()) {
    case DomainKind::Interval: extent = domain.upper().x - domain.lower().x; break;
    case DomainKind::Rectangle: extent = std::max(domain.upper().x - domain.lower().x, domain.upper().y - domain.lower().y); break;
    case DomainKind::Disk: extent = domain.outer_radius(); break;
    case DomainKind::Annulus: extent = domain.outer_radius() - domain.inner_radius(); break;
    }
    const double ell = v_max > 0.0 ? std::sqrt(delta * a_min / v_max) : extent;
    const double cells = std::ceil(extent / (factor * ell));
    if (cells > 5e7) throw ResolutionError("boundary_layer_grid: requested grid is too large");
    const int n = std::max(min_cells, static_cast<int>(cells));
    return Grid::make(domain, n, angular);
}

// ---------------------------------------------------------------------------

double GridFunction::at(Point x) const {
    const Grid& g = *grid;
    auto locate = [](double q, double lo, double h, int n, int& i, double& t) {
        double s = (q - lo) / h;
        s = std::clamp(s, 0.0, static_cast<double>(n));
        i = std::min(static_cast<int>(std::floor(s)), n - 1);
        t = s - i;
    };
    int i = 0, j = 0;
    double s = 0.0, t = 0.0;
    switch (g.kind()) {
    case GridKind::Cartesian1D:
        locate(x.x, g.q1(0), g.h1(), g.n1(), i, s);
        return (1.0 - s) * values[g.node(i, 0)] + s * values[g.node(i + 1, 0)];
    case GridKind::Cartesian2D:
        locate(x.x, g.q1(0), g.h1(), g.n1(), i, s);
        locate(x.y, g.q2(0), g.h2(), g.n2(), j, t);
        return (1 - s) * (1 - t) * values[g.node(i, j)] + s * (1 - t) * values[g.node(i + 1, j)] +
               (1 - s) * t * values[g.node(i, j + 1)] + s * t * values[g.node(i + 1, j + 1)];
    case GridKind::Polar: {
        const Point d = x - g.domain().center();
        double theta = std::atan2(d.y, d.x);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        locate(norm(d), g.q1(0), g.h1(), g.n1(), i, s);
        double u = theta / g.h2();
        j = static_cast<int>(std::floor(u)) % g.n2();
        t = u - std::floor(u);
        const int j1 = (j + 1) % g.n2();
        return (1 - s) * (1 - t) * values[g.node(i, j)] + s * (1 - t) * values[g.node(i + 1, j)] +
               (1 - s) * t * values[g.node(i, j1)] + s * t * values[g.node(i + 1, j1)];
    }
    }
    return 0.0;
}

void write_csv(std::ostream& os, const GridFunction& u) {
    os << "x,y,value\n";
    os.precision(17);
    for (std::size_t p = 0; p < u.values.size(); ++p) {
        const Point x = u.grid->coord(p);
        os << x.x << ',' << x.y << ',' << u.values[p] << '\n';
    }
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

// Coefficients of the operator in computational coordinates:
//   L phi = 1/2 (1/J) d_a (J K^{ab} d_b phi) + beta^a d_a phi.
struct Metric {
    double J = 1.0;
    Mat2 K{};
    Point beta{};
};

Metric metric_at(const Grid& g, const CoefficientSet& coeffs, std::size_t node) {
    const Point x = g.coord(node);
    const Mat2 a = coeffs.diffusion().a_at(x);
    const Point b = coeffs.diffusion().b_at(x);
    Metric m;
    if (g.kind() != GridKind::Polar) {
        m.K = a;
        m.beta = b;
        return m;
    }
    const double r = g.q1(g.index1(node));
    const double th = g.q2(g.index2(node));
    const double c = std::cos(th), s = std::sin(th);
    // Rows of P: grad r = (c, s), grad theta = (-s, c) / r.
    const double P[2][2] = {{c, s}, {-s / r, c / r}};
    const double A[2][2] = {{a.xx, a.xy}, {a.yx, a.yy}};
    double K[2][2] = {};
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v) K[p][q] += P[p][u] * A[u][v] * P[q][v];
    m.J = r;
    m.K = {K[0][0], K[0][1], K[1][0], K[1][1]};
    m.beta = {c * b.x + s * b.y, (-s * b.x + c * b.y) / r};
    return m;
}

double min_eigenvalue(const Mat2& a, int dim) {
    if (dim == 1) return a.xx;
    const double half_tr = 0.5 * (a.xx + a.yy);
    const double off = 0.5 * (a.xy + a.yx);
    return half_tr - std::sqrt(0.25 * (a.xx - a.yy) * (a.xx - a.yy) + off * off);
}

void check_resolution(double delta, const CoefficientSet& coeffs, const Grid& g, const FdmOptions& options,
                      std::vector<std::string>* warnings) {
    double a_min = std::numeric_limits<double>::infinity();
    double v_max = 0.0;
    for (std::size_t p = 0; p < g.node_count(); ++p) {
        const Point x = g.coord(p);
        a_min = std::min(a_min, min_eigenvalue(coeffs.diffusion().a_at(x), coeffs.dimension()));
        v_max = std::max(v_max, coeffs.V()(x));
    }
    if (!(a_min > 0.0)) throw CoefficientError("fdm: diffusion matrix is not positive definite on the grid");
    if (!(v_max > 0.0)) return;
    const double limit = 0.5 * std::sqrt(delta * a_min / v_max);
    const double h = g.normal_spacing();
    if (h <= limit) return;
    std::ostringstream msg;
    msg << "grid spacing " << h << " exceeds 1/2 sqrt(delta a_min / V_max) = " << limit << " at delta = " << delta;
    if (!options.allow_underresolved) throw ResolutionError("fdm: " + msg.str());
    if (warnings) warnings->push_back(msg.str());
}

// Rows: unknowns. Columns: all nodes.
SparseMatrix assemble_delta_L(double delta, const CoefficientSet& coeffs, const Grid& g) {
    const std::size_t nodes = g.node_count();
    std::vector<Metric> met(nodes);
    for (std::size_t p = 0; p < nodes; ++p) met[p] = metric_at(g, coeffs, p);

    const bool two_d = g.kind() != GridKind::Cartesian1D;
    const bool periodic = g.kind() == GridKind::Polar;
    const int n2 = g.n2();
    const double h1 = g.h1(), h2 = g.h2();
    auto nb = [&](int i, int j) {
        if (periodic) j = ((j % n2) + n2) % n2;
        return g.node(i, j);
    };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(g.unknown_count() * (two_d ? 9 : 3));
    for (std::size_t row = 0; row < g.unknown_count(); ++row) {
        const std::size_t p = g.interior_nodes()[row];
        const int i = g.index1(p);
        const int j = g.index2(p);
        const Metric& m = met[p];
        auto add = [&](std::size_t q, double val) { trip.emplace_back(static_cast<int>(row), static_cast<int>(q), delta * val); };

        if (periodic && g.reflecting_core() && i == 0) {
            // Half cell [r0, r0 + h/2] with zero radial flux through r0.
            const std::size_t e = nb(1, j);
            const double flux = 0.5 * (met[p].J * met[p].K.xx + met[e].J * met[e].K.xx);
            const double vol = (g.q1(0) + 0.25 * h1) * 0.5 * h1;
            const double cr = 0.5 * flux / (h1 * vol);
            add(e, cr);
            add(p, -cr);
            const double ct = 0.5 * m.K.yy / (h2 * h2);
            add(nb(0, j + 1), ct);
            add(nb(0, j - 1), ct);
            add(p, -2.0 * ct);
            add(e, m.beta.x / h1);
            add(p, -m.beta.x / h1);
            add(nb(0, j + 1), m.beta.y / (2.0 * h2));
            add(nb(0, j - 1), -m.beta.y / (2.0 * h2));
            continue;
        }

        const double T = 0.5 / m.J;
        {
            const std::size_t e = nb(i + 1, j), w = nb(i - 1, j);
            const double fe = 0.5 * (m.J * m.K.xx + met[e].J * met[e].K.xx);
            const double fw = 0.5 * (m.J * m.K.xx + met[w].J * met[w].K.xx);
            add(e, T * fe / (h1 * h1));
            add(w, T * fw / (h1 * h1));
            add(p, -T * (fe + fw) / (h1 * h1));
            add(e, m.beta.x / (2.0 * h1));
            add(w, -m.beta.x / (2.0 * h1));
        }
        if (!two_d) continue;
        {
            const std::size_t n = nb(i, j + 1), s = nb(i, j - 1);
            const double fn = 0.5 * (m.J * m.K.yy + met[n].J * met[n].K.yy);
            const double fs = 0.5 * (m.J * m.K.yy + met[s].J * met[s].K.yy);
            add(n, T * fn / (h2 * h2));
            add(s, T * fs / (h2 * h2));
            add(p, -T * (fn + fs) / (h2 * h2));
            add(n, m.beta.y / (2.0 * h2));
            add(s, -m.beta.y / (2.0 * h2));
        }
        // Cross terms d1 (J K12 d2 phi) + d2 (J K21 d1 phi), centered.
        const double c = T / (4.0 * h1 * h2);
        const std::size_t e = nb(i + 1, j), w = nb(i - 1, j), n = nb(i, j + 1), s = nb(i, j - 1);
        const double ge = met[e].J * met[e].K.xy, gw = met[w].J * met[w].K.xy;
        const double gn = met[n].J * met[n].K.yx, gs = met[s].J * met[s].K.yx;
        if (ge != 0.0 || gw != 0.0 || gn != 0.0 || gs != 0.0) {
            add(nb(i + 1, j + 1), c * (ge + gn));
            add(nb(i + 1, j - 1), -c * (ge + gs));
            add(nb(i - 1, j + 1), -c * (gw + gn));
            add(nb(i - 1, j - 1), c * (gw + gs));
        }
    }
    SparseMatrix M(static_cast<Eigen::Index>(g.unknown_count()), static_cast<Eigen::Index>(nodes));
    M.setFromTriplets(trip.begin(), trip.end());
    M.prune(0.0);
    return M;
}

LinearSolverKind resolve_kind(LinearSolverKind kind, const Grid& g) {
    if (kind != LinearSolverKind::Auto) return kind;
    return g.kind() == GridKind::Cartesian1D ? LinearSolverKind::SparseLU : LinearSolverKind::BiCGSTAB;
}

} // namespace

SparseMatrix assemble_local(double delta, const CoefficientSet& coeffs, const Grid& grid, const FdmOptions& options) {
    if (!(delta > 0.0)) throw ConfigError("fdm: delta must be positive");
    if (coeffs.dimension() != grid.domain().dimension()) throw ConfigError("fdm: coefficient and grid dimensions differ");
    check_resolution(delta, coeffs, grid, options, nullptr);
    return assemble_delta_L(delta, coeffs, grid);
}

Eigen::VectorXd mu_quadrature_weights(const CoefficientSet& coeffs, const Grid& grid) {
    const std::vector<double> vol = grid.volume_weights();
    Eigen::VectorXd w(static_cast<Eigen::Index>(vol.size()));
    for (std::size_t p = 0; p < vol.size(); ++p) w[static_cast<Eigen::Index>(p)] = vol[p] * coeffs.mu()(grid.coord(p));
    const double total = w.sum();
    if (!(total > 0.0)) throw CoefficientError("fdm: mu has no mass on the grid");
    return w / total;
}

DiscreteOperator assemble_operator(double delta, const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                                   const FdmOptions& options) {
    if (!(delta > 0.0)) throw ConfigError("fdm: delta must be positive");
    const Grid& g = *grid;
    if (coeffs.dimension() != g.domain().dimension()) throw ConfigError("fdm: coefficient and grid dimensions differ");
    DiscreteOperator op;
    op.grid = grid;
    op.delta = delta;
    check_resolution(delta, coeffs, g, options, &op.warnings);
    const SparseMatrix full = assemble_delta_L(delta, coeffs, g);

    const auto nu = static_cast<Eigen::Index>(g.unknown_count());
    op.v.resize(nu);
    for (Eigen::Index r = 0; r < nu; ++r) op.v[r] = coeffs.V()(g.coord(g.interior_nodes()[r]));

    std::vector<Eigen::Triplet<double>> loc, bnd;
    for (Eigen::Index r = 0; r < full.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(full, r); it; ++it) {
            const auto q = static_cast<std::size_t>(it.col());
            if (g.is_boundary(q))
                bnd.emplace_back(static_cast<int>(r), static_cast<int>(q), it.value());
            else
                loc.emplace_back(static_cast<int>(r), static_cast<int>(g.unknown(q)), it.value());
        }
        loc.emplace_back(static_cast<int>(r), static_cast<int>(r), -op.v[r]);
    }
    op.A_loc.resize(nu, nu);
    op.A_loc.setFromTriplets(loc.begin(), loc.end());
    op.boundary_coupling.resize(nu, static_cast<Eigen::Index>(g.node_count()));
    op.boundary_coupling.setFromTriplets(bnd.begin(), bnd.end());

    op.w = mu_quadrature_weights(coeffs, g);
    op.w_interior.resize(nu);
    for (Eigen::Index r = 0; r < nu; ++r) op.w_interior[r] = op.w[static_cast<Eigen::Index>(g.interior_nodes()[r])];
    return op;
}

// ---------------------------------------------------------------------------
// Linear solvers

struct LinearSolver::Impl {
    using ColMatrix = Eigen::SparseMatrix<double>;
    ColMatrix A;
    std::unique_ptr<Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>> lu;
    std::unique_ptr<Eigen::BiCGSTAB<ColMatrix, Eigen::IncompleteLUT<double>>> iterative;

    void factor_lu() {
        lu = std::make_unique<Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>>>();
        lu->analyzePattern(A);
        lu->factorize(A);
        if (lu->info() != Eigen::Success) throw SolverError("sparse LU factorization failed: " + lu->lastErrorMessage());
    }
};

LinearSolver::LinearSolver(const SparseMatrix& A, LinearSolverKind kind, double tolerance)
    : impl_(std::make_unique<Impl>()), kind_(kind == LinearSolverKind::Auto ? LinearSolverKind::SparseLU : kind) {
    if (A.rows() != A.cols()) throw SolverError("linear solver: matrix is not square");
    impl_->A = A;
    impl_->A.makeCompressed();
    if (kind_ == LinearSolverKind::SparseLU) {
        impl_->factor_lu();
        return;
    }
    impl_->iterative = std::make_unique<Eigen::BiCGSTAB<Impl::ColMatrix, Eigen::IncompleteLUT<double>>>();
    impl_->iterative->preconditioner().setDroptol(1e-8);
    impl_->iterative->preconditioner().setFillfactor(20);
    impl_->iterative->setTolerance(tolerance);
    impl_->iterative->setMaxIterations(std::max<Eigen::Index>(1000, 4 * A.rows()));
    impl_->iterative->compute(impl_->A);
    if (impl_->iterative->info() != Eigen::Success) {
        impl_->iterative.reset();
        kind_ = LinearSolverKind::SparseLU;
        impl_->factor_lu();
    }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b) const {
    if (impl_->iterative) {
        Eigen::VectorXd x = impl_->iterative->solve(b);
        if (impl_->iterative->info() == Eigen::Success && x.allFinite()) return x;
        // Iterative solve stalled; factor once and use the direct path from here on.
        impl_->iterative.reset();
        impl_->factor_lu();
    }
    Eigen::VectorXd x = impl_->lu->solve(b);
    if (impl_->lu->info() != Eigen::Success || !x.allFinite()) throw SolverError("sparse LU solve failed");
    return x;
}

RankOneSolver::RankOneSolver(const SparseMatrix& A, Eigen::VectorXd v, Eigen::VectorXd w, LinearSolverKind kind,
                             double tolerance)
    : base_(A, kind, tolerance), A_(A), v_(std::move(v)), w_(std::move(w)) {
    z_ = base_.solve(v_);
    denominator_ = 1.0 + w_.dot(z_);
    if (std::abs(denominator_) >= 1e-12) return;
    const Eigen::Index n = A.rows();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(A.nonZeros() + 2 * n + 1));
    for (Eigen::Index r = 0; r < A.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(A, r); it; ++it)
            trip.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
    for (Eigen::Index r = 0; r < n; ++r) {
        if (v_[r] != 0.0) trip.emplace_back(static_cast<int>(r), static_cast<int>(n), v_[r]);
        if (w_[r] != 0.0) trip.emplace_back(static_cast<int>(n), static_cast<int>(r), w_[r]);
    }
    trip.emplace_back(static_cast<int>(n), static_cast<int>(n), -1.0);
    SparseMatrix B(n + 1, n + 1);
    B.setFromTriplets(trip.begin(), trip.end());
    bordered_ = std::make_unique<LinearSolver>(B, LinearSolverKind::SparseLU);
}

Eigen::VectorXd RankOneSolver::solve_once(const Eigen::VectorXd& b) const {
    if (bordered_) {
        Eigen::VectorXd rhs(b.size() + 1);
        rhs.head(b.size()) = b;
        rhs[b.size()] = 0.0;
        return bordered_->solve(rhs).head(b.size());
    }
    const Eigen::VectorXd y = base_.solve(b);
    return y - z_ * (w_.dot(y) / denominator_);
}

Eigen::VectorXd RankOneSolver::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = solve_once(b);
    // One step of iterative refinement against the unfactored operator.
    const Eigen::VectorXd r = b - (A_ * x + v_ * w_.dot(x));
    x += solve_once(r);
    return x;
}

// ---------------------------------------------------------------------------
// Problems

namespace {

GridFunction scatter(std::shared_ptr<const Grid> grid, const Eigen::VectorXd& interior,
                     const Eigen::VectorXd& boundary_values) {
    GridFunction u;
    u.grid = grid;
    u.values.assign(grid->node_count(), 0.0);
    for (std::size_t p : grid->boundary_nodes()) u.values[p] = boundary_values[static_cast<Eigen::Index>(p)];
    for (std::size_t r = 0; r < grid->unknown_count(); ++r)
        u.values[grid->interior_nodes()[r]] = interior[static_cast<Eigen::Index>(r)];
    return u;
}

} // namespace

DirichletSystem assemble_dirichlet_system(double delta, const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                                          const ScalarField& f, const FdmOptions& options) {
    DirichletSystem sys;
    sys.op = assemble_operator(delta, coeffs, grid, options);
    const Grid& g = *grid;
    sys.boundary_values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.node_count()));
    double boundary_mass = 0.0;
    for (std::size_t p : g.boundary_nodes()) {
        const double fp = f(g.coord(p));
        sys.boundary_values[static_cast<Eigen::Index>(p)] = fp;
        boundary_mass += sys.op.w[static_cast<Eigen::Index>(p)] * fp;
    }
    sys.rhs = -(sys.op.boundary_coupling * sys.boundary_values) - sys.op.v * boundary_mass;
    return sys;
}

GridFunction solve_u_delta_V(double delta, const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                             const FdmOptions& options) {
    const DiscreteOperator op = assemble_operator(delta, coeffs, grid, options);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(grid->node_count()));
    const Eigen::VectorXd rhs = -(op.boundary_coupling * ones);
    const LinearSolver solver(op.A_loc, resolve_kind(options.solver, *grid), options.iterative_tolerance);
    return scatter(grid, solver.solve(rhs), ones);
}

GridFunction solve_dirichlet_nonlocal(double delta, const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                                      const ScalarField& f, const FdmOptions& options) {
    const DirichletSystem sys = assemble_dirichlet_system(delta, coeffs, grid, f, options);
    const RankOneSolver solver(sys.op.A_loc, sys.op.v, sys.op.w_interior, resolve_kind(options.solver, *grid),
                               options.iterative_tolerance);
    return scatter(grid, solver.solve(sys.rhs), sys.boundary_values);
}

GridFunction solve_dirichlet_nonlocal(double delta, const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                                      const FdmOptions& options) {
    return solve_dirichlet_nonlocal(delta, coeffs, std::move(grid), coeffs.f(), options);
}

EigenResult principal_eigenvalue(double delta, const CoefficientSet& coeffs, std::shared_ptr<const Grid> grid,
                                 const FdmOptions& options) {
    const DiscreteOperator op = assemble_operator(delta, coeffs, grid, options);
    // Direct factorization: inverse iteration needs solves accurate well below the
    // eigenvalue tolerance.
    const LinearSolverKind kind =
        options.solver == LinearSolverKind::Auto ? LinearSolverKind::SparseLU : options.solver;
    const RankOneSolver solver(op.A_loc, op.v, op.w_interior, kind, options.iterative_tolerance);
    auto apply_M = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return op.A_loc * x + op.v * op.w_interior.dot(x);
    };

    const auto n = static_cast<Eigen::Index>(grid->unknown_count());
    Eigen::VectorXd psi = Eigen::VectorXd::Ones(n);
    double lambda = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    EigenResult res;
    double best_residual = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int it = 1; it <= options.max_eigen_iterations; ++it) {
        const Eigen::VectorXd y = solver.solve(psi);
        const double py = psi.dot(y);
        if (py == 0.0 || !std::isfinite(py)) throw SolverError("inverse iteration broke down");
        const double next = -psi.squaredNorm() / py;
        Eigen::Index imax = 0;
        y.cwiseAbs().maxCoeff(&imax);
        psi = y / y[imax];
        residual = (apply_M(psi) + next * psi).norm() / psi.norm();
        const double change = std::abs(next - lambda) / std::max(std::abs(next), 1e-300);
        lambda = next;
        res.iterations = it;
        if (residual < 0.5 * best_residual) {
            best_residual = residual;
            stalled = 0;
        } else {
            ++stalled;
        }
        // Converged, or at the roundoff floor of the residual. The quotient
        // from the solve jitters at ~1e-10 relative, so it only gates the
        // stalled case.
        if (it >= 3 && (residual <= 1e-10 || (stalled >= 20 && change <= 1e-8))) break;
        if (it == options.max_eigen_iterations)
            throw SolverError("inverse iteration did not converge in " + std::to_string(it) + " iterations");
    }
    // Rayleigh quotient with M itself: free of the solve's roundoff.
    lambda = -psi.dot(apply_M(psi)) / psi.squaredNorm();
    residual = (apply_M(psi) + lambda * psi).norm() / psi.norm();
    if (!(lambda > 0.0)) {
        std::ostringstream msg;
        msg << "principal eigenvalue estimate " << lambda << " is not positive";
        throw SolverError(msg.str());
    }
    if (residual > 1e-6 * lambda) {
        std::ostringstream msg;
        msg << "inverse iteration residual " << residual << " too large for eigenvalue " << lambda;
        throw SolverError(msg.str());
    }
    if (psi.minCoeff() < -1e-8) throw SolverError("principal eigenvector changes sign");
    res.lambda0 = lambda;
    res.residual = residual;
    res.eigenfunction =
        scatter(grid, psi, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid->node_count())));
    return res;
}

// ---------------------------------------------------------------------------

BoundaryFlux boundary_flux(const GridFunction& u, const CoefficientSet& coeffs) {
    const Grid& g = *u.grid;
    const int n1 = g.n1(), n2 = g.n2();
    const double h1 = g.h1(), h2 = g.h2();
    const auto& U = u.values;
    BoundaryFlux out;
    auto record = [&](std::size_t p, Point n, Point t, double dn, double dt) {
        const Point x = g.coord(p);
        const Mat2 a = coeffs.diffusion().a_at(x);
        const Point an{a.xx * n.x + a.xy * n.y, a.yx * n.x + a.yy * n.y};
        out.nodes.push_back(p);
        out.points.push_back(x);
        out.normals.push_back(n);
        // grad u = dn n + dt t; n . a grad u with a symmetric.
        out.values.push_back(dn * dot(an, n) + dt * dot(an, t));
    };
    auto one_sided = [](double u0, double u1, double u2, double h) { return (-3.0 * u0 + 4.0 * u1 - u2) / (2.0 * h); };

    switch (g.kind()) {
    case GridKind::Cartesian1D:
        record(g.node(0, 0), {1.0, 0.0}, {}, one_sided(U[0], U[1], U[2], h1), 0.0);
        record(g.node(n1, 0), {-1.0, 0.0}, {},
               one_sided(U[g.node(n1, 0)], U[g.node(n1 - 1, 0)], U[g.node(n1 - 2, 0)], h1), 0.0);
        break;
    case GridKind::Cartesian2D:
        for (int j = 1; j < n2; ++j) {
            const double tl = (U[g.node(0, j + 1)] - U[g.node(0, j - 1)]) / (2.0 * h2);
            record(g.node(0, j), {1.0, 0.0}, {0.0, 1.0},
                   one_sided(U[g.node(0, j)], U[g.node(1, j)], U[g.node(2, j)], h1), tl);
            const double tr = (U[g.node(n1, j + 1)] - U[g.node(n1, j - 1)]) / (2.0 * h2);
            record(g.node(n1, j), {-1.0, 0.0}, {0.0, 1.0},
                   one_sided(U[g.node(n1, j)], U[g.node(n1 - 1, j)], U[g.node(n1 - 2, j)], h1), tr);
        }
        for (int i = 1; i < n1; ++i) {
            const double tb = (U[g.node(i + 1, 0)] - U[g.node(i - 1, 0)]) / (2.0 * h1);
            record(g.node(i, 0), {0.0, 1.0}, {1.0, 0.0},
                   one_sided(U[g.node(i, 0)], U[g.node(i, 1)], U[g.node(i, 2)], h2), tb);
            const double tt = (U[g.node(i + 1, n2)] - U[g.node(i - 1, n2)]) / (2.0 * h1);
            record(g.node(i, n2), {0.0, -1.0}, {1.0, 0.0},
                   one_sided(U[g.node(i, n2)], U[g.node(i, n2 - 1)], U[g.node(i, n2 - 2)], h2), tt);
        }
        break;
    case GridKind::Polar:
        // Outer circle first, then the inner circle of an annulus.
        for (int ring = 0; ring < (g.reflecting_core() ? 1 : 2); ++ring) {
            const int i0 = ring == 0 ? n1 : 0;
            const int step = ring == 0 ? -1 : 1;
            const double r = g.q1(i0);
            for (int j = 0; j < n2; ++j) {
                const double th = g.q2(j);
                const Point er{std::cos(th), std::sin(th)};
                const Point et{-std::sin(th), std::cos(th)};
                const int jp = (j + 1) % n2, jm = (j + n2 - 1) % n2;
                record(g.node(i0, j), ring == 0 ? -1.0 * er : er, et,
                       one_sided(U[g.node(i0, j)], U[g.node(i0 + step, j)], U[g.node(i0 + 2 * step, j)], h1),
                       (U[g.node(i0, jp)] - U[g.node(i0, jm)]) / (2.0 * h2 * r));
            }
        }
        break;
    }
    return out;
}

double integrate_mu(const GridFunction& u, const CoefficientSet& coeffs) {
    const Eigen::VectorXd w = mu_quadrature_weights(coeffs, *u.grid);
    double s = 0.0;
    for (std::size_t p = 0; p < u.values.size(); ++p) s += w[static_cast<Eigen::Index>(p)] * u.values[p];
    return s;
}

} // namespace jumpdiff
