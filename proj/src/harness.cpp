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

#include "jumpdiff/harness.hpp"

#include "jumpdiff/error.hpp"

#include "json.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace jumpdiff {

using nlohmann::json;

namespace {

/// Runs f(i) for i in [0, n) on the sweep workers; results are stored by
/// index so the merge order never depends on scheduling. The first failure
/// in index order is rethrown.
template <class R, class F>
std::vector<R> sweep(std::size_t n, int threads, F f) {
    std::vector<std::optional<R>> out(n);
    std::vector<std::exception_ptr> errors(n);
    const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (long i = 0; i < static_cast<long>(n); ++i) {
        try {
            out[static_cast<std::size_t>(i)].emplace(f(static_cast<std::size_t>(i)));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    std::vector<R> merged;
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        merged.push_back(std::move(*out[i]));
    }
    return merged;
}

std::vector<double> sorted_deltas(const ExperimentOptions& opts, std::size_t min_count) {
    std::vector<double> d = opts.deltas;
    if (d.size() < min_count) throw ConfigError("experiment needs at least " + std::to_string(min_count) + " delta values");
    for (double x : d)
        if (!(x > 0.0)) throw ConfigError("delta values must be positive");
    std::sort(d.begin(), d.end(), std::greater<>());
    return d;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double relative_gap(double value, double target) {
    return std::abs(value - target) / (std::abs(target) > 1e-12 ? std::abs(target) : 1.0);
}

Check tolerance_check(std::string name, double value, double target, double tol) {
    const double gap = relative_gap(value, target);
    return {std::move(name), gap <= tol, true,
            "value " + fmt(value) + ", target " + fmt(target) + ", relative gap " + fmt(gap) + " (tol " + fmt(tol) + ")"};
}

double exponent_band(int k) { return k == 0 ? 0.02 : k == 1 ? 0.03 : 0.05; }

SimConfig harness_mc(const ProblemSpec& p, double delta, const ExperimentOptions& opts, const TheoryResult* theory) {
    SimConfig cfg = opts.mc;
    cfg.delta = delta;
    if (opts.auto_exit_mode) {
        if (p.domain.dimension() == 1) cfg.exit_mode = ExitDetection::BridgeCorrected1D;
        if (theory != nullptr && theory->c_eig > 0.0) {
            const double lambda = theory->c_eig * std::pow(delta, theory->exponent);
            cfg.max_steps = static_cast<std::int64_t>(std::ceil(50.0 / (lambda * cfg.dt)));
        }
    }
    return cfg;
}

void add_fit_diagnostics(SweepResult& r) {
    if (!r.fit) return;
    const ExponentFit& f = *r.fit;
    r.diagnostics.push_back("exponent " + fmt(f.exponent) + " CI [" + fmt(f.ci_lo) + ", " + fmt(f.ci_hi) +
                            "], bootstrap [" + fmt(f.bootstrap_lo) + ", " + fmt(f.bootstrap_hi) +
                            "], truncation band " + fmt(f.truncation_band));
    r.diagnostics.push_back("pure power-law exponent " + fmt(f.pure_exponent) + " CI [" + fmt(f.pure_ci_lo) + ", " +
                            fmt(f.pure_ci_hi) + "]");
    if (f.excluded_largest) r.diagnostics.push_back("largest delta excluded from the fit window");
}

json fit_json(const ExponentFit& f) {
    return {{"exponent", f.exponent},
            {"ci", {f.ci_lo, f.ci_hi}},
            {"bootstrap_ci", {f.bootstrap_lo, f.bootstrap_hi}},
            {"truncation_band", f.truncation_band},
            {"log_prefactor", f.log_prefactor},
            {"pure_exponent", f.pure_exponent},
            {"pure_ci", {f.pure_ci_lo, f.pure_ci_hi}},
            {"excluded_largest", f.excluded_largest},
            {"deltas_used", f.deltas_used},
            {"resamples", f.resamples}};
}

std::string safe_name(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return s;
}

/// Boundary component of a flux node: 0 for the outer circle of an annulus,
/// 1 for the inner; each end of an interval is its own component.
int component(const Domain& d, Point p) {
    switch (d.kind()) {
    case DomainKind::Interval:
        return p.x < 0.5 * (d.lower().x + d.upper().x) ? 0 : 1;
    case DomainKind::Annulus:
        return norm(p - d.center()) > 0.5 * (d.inner_radius() + d.outer_radius()) ? 0 : 1;
    default:
        return 0;
    }
}

SweepResult start(std::string experiment, const ProblemSpec& p) {
    SweepResult r;
    r.experiment = std::move(experiment);
    r.problem = p.name;
    return r;
}

} // namespace

std::vector<double> default_deltas() {
    return {1e-2, std::pow(10.0, -2.5), 1e-3, std::pow(10.0, -3.5), 1e-4};
}

SimConfig ExperimentOptions::default_mc() {
    SimConfig c;
    c.paths = 2000;
    c.dt = 1e-3;
    return c;
}

bool SweepResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || !c.asserted; });
}

std::vector<double> SweepResult::values(const std::string& method, const std::string& quantity) const {
    std::vector<double> v;
    for (const SweepRow& r : rows)
        if (r.method == method && r.quantity == quantity) v.push_back(r.value);
    return v;
}

std::shared_ptr<const Grid> experiment_grid(const ProblemSpec& p, double delta, const ExperimentOptions& opts) {
    if (opts.grid_n > 0) return std::make_shared<const Grid>(Grid::make(p.domain, opts.grid_n, opts.angular));
    return std::make_shared<const Grid>(
        boundary_layer_grid(p.domain, p.coeffs, delta, opts.grid_factor, opts.min_cells, opts.angular));
}

TheoryResult problem_theory(const ProblemSpec& p) {
    if (!p.theory_applies) throw ConfigError("the boundary-limit theory does not apply to " + p.name);
    return evaluate_theory(p.coeffs, default_boundary_quadrature(p.domain), default_interior_quadrature(p.domain));
}

// ---------------------------------------------------------------------------

SweepResult run_thm1_experiment(const ProblemSpec& p, const ExperimentOptions& opts) {
    const std::vector<double> d = sorted_deltas(opts, 1);
    const TheoryResult theory = problem_theory(p);
    SweepResult r = start("thm1", p);

    struct Point2 {
        double at_x0, at_x1;
    };
    const auto phi = sweep<Point2>(d.size(), opts.threads, [&](std::size_t i) {
        const GridFunction u = solve_dirichlet_nonlocal(d[i], p.coeffs, experiment_grid(p, d[i], opts), opts.fdm);
        return Point2{u.at(p.x0), u.at(p.x1)};
    });
    for (std::size_t i = 0; i < d.size(); ++i) r.rows.push_back({d[i], "fdm", "phi", phi[i].at_x0, 0.0});

    if (opts.run_mc) {
        const SimConfig cfg = harness_mc(p, d.front(), opts, &theory);
        const ExitLawEstimate e =
            estimate_exit_law(p.x0, p.coeffs, p.domain, cfg, p.domain.dimension() == 1 ? 2 : 36);
        r.rows.push_back({d.front(), "mc", "phi", e.mean_f, e.stderr_f});
        const double z = e.stderr_f > 0.0 ? std::abs(e.mean_f - phi.front().at_x0) / e.stderr_f : 0.0;
        r.checks.push_back({"mc-vs-fdm-largest-delta", z <= 3.0, false,
                            "|mc - fdm| / SE = " + fmt(z) + " (dt " + fmt(cfg.dt) + ", " +
                                std::to_string(cfg.paths) + " paths)"});
        if (e.censored > 0) r.diagnostics.push_back(std::to_string(e.censored) + " MC paths censored");
    }
    r.rows.push_back({d.back(), "theory", "phi", theory.phi0, 0.0});

    const double err_small = std::abs(phi.back().at_x0 - theory.phi0);
    const double err_large = std::abs(phi.front().at_x0 - theory.phi0);
    r.checks.push_back(tolerance_check("phi-limit", phi.back().at_x0, theory.phi0, 0.02));
    r.checks.push_back({"error-decreasing", err_small <= err_large + 1e-9, true,
                        "|phi - phi0| " + fmt(err_large) + " at delta " + fmt(d.front()) + ", " + fmt(err_small) +
                            " at delta " + fmt(d.back())});
    r.checks.push_back(tolerance_check("x-independence", phi.back().at_x1, phi.back().at_x0, 0.02));
    r.diagnostics.push_back("phi(x1) at the smallest delta: " + fmt(phi.back().at_x1));
    return r;
}

SweepResult run_thm2_experiment(const ProblemSpec& p, const ExperimentOptions& opts) {
    const std::vector<double> d = sorted_deltas(opts, 3);
    const TheoryResult theory = problem_theory(p);
    SweepResult r = start("thm2", p);
    const auto lambda = sweep<double>(d.size(), opts.threads, [&](std::size_t i) {
        return principal_eigenvalue(d[i], p.coeffs, experiment_grid(p, d[i], opts), opts.fdm).lambda0;
    });
    for (std::size_t i = 0; i < d.size(); ++i) r.rows.push_back({d[i], "fdm", "lambda0", lambda[i], 0.0});

    r.fit = fit_exponent(d, lambda, opts.seed, opts.resamples);
    r.target_exponent = theory.exponent;
    r.prefactor = lambda.back() * std::pow(d.back(), -theory.exponent);
    r.prefactor_target = theory.c_eig;
    const double band = exponent_band(p.coeffs.k());
    r.checks.push_back({"exponent-ci", r.fit->contains(theory.exponent), true,
                        "CI [" + fmt(r.fit->ci_lo) + ", " + fmt(r.fit->ci_hi) + "] vs " + fmt(theory.exponent)});
    r.checks.push_back({"exponent-band", std::abs(r.fit->exponent - theory.exponent) <= band, true,
                        "exponent " + fmt(r.fit->exponent) + " vs " + fmt(theory.exponent) + " +- " + fmt(band)});
    r.checks.push_back(tolerance_check("prefactor", r.prefactor, theory.c_eig, band));
    add_fit_diagnostics(r);
    return r;
}

SweepResult run_lemma_boundary_experiment(const ProblemSpec& p, const ExperimentOptions& opts,
                                          double uniformity_tolerance) {
    const std::vector<double> d = sorted_deltas(opts, 1);
    SweepResult r = start("lemma-boundary", p);
    struct Stats {
        double mean, max_dev, spread;
    };
    const auto stats = sweep<Stats>(d.size(), opts.threads, [&](std::size_t i) {
        const BoundaryFlux f = boundary_flux(solve_u_delta_V(d[i], p.coeffs, experiment_grid(p, d[i], opts), opts.fdm),
                                             p.coeffs);
        if (f.values.empty()) throw SolverError("no boundary flux nodes");
        Stats s{0.0, 0.0, 0.0};
        double lo[2] = {INFINITY, INFINITY}, hi[2] = {-INFINITY, -INFINITY}, sum[2] = {0, 0};
        int count[2] = {0, 0};
        for (std::size_t n = 0; n < f.values.size(); ++n) {
            const double scaled = std::sqrt(d[i]) * f.values[n];
            const Point x = f.points[n], nu = f.normals[n];
            const Mat2 a = p.coeffs.diffusion().a_at(x);
            const double nan = nu.x * (a.xx * nu.x + a.xy * nu.y) + nu.y * (a.yx * nu.x + a.yy * nu.y);
            const double target = -std::sqrt(2.0 * p.coeffs.V()(x) * nan);
            s.mean += scaled;
            s.max_dev = std::max(s.max_dev, relative_gap(scaled, target));
            const int c = component(p.domain, x);
            lo[c] = std::min(lo[c], scaled);
            hi[c] = std::max(hi[c], scaled);
            sum[c] += scaled;
            ++count[c];
        }
        s.mean /= static_cast<double>(f.values.size());
        for (int c = 0; c < 2; ++c)
            if (count[c] > 0) s.spread = std::max(s.spread, (hi[c] - lo[c]) / std::abs(sum[c] / count[c]));
        return s;
    });
    for (std::size_t i = 0; i < d.size(); ++i) {
        r.rows.push_back({d[i], "fdm", "flux", stats[i].mean, 0.0});
        r.rows.push_back({d[i], "fdm", "flux-deviation", stats[i].max_dev, 0.0});
    }
    r.checks.push_back({"flux-limit", stats.back().max_dev <= 0.03, true,
                        "largest relative deviation " + fmt(stats.back().max_dev) + " at delta " + fmt(d.back())});
    r.checks.push_back({"flux-uniformity", stats.back().spread <= uniformity_tolerance, uniformity_tolerance > 0.0,
                        "relative spread along a boundary component " + fmt(stats.back().spread)});
    return r;
}

SweepResult run_decay_experiment(const ProblemSpec& p, const ExperimentOptions& opts) {
    const std::vector<double> d = sorted_deltas(opts, 3);
    SweepResult r = start("decay", p);
    const auto u = sweep<double>(d.size(), opts.threads, [&](std::size_t i) {
        return solve_u_delta_V(d[i], p.coeffs, experiment_grid(p, d[i], opts), opts.fdm).at(p.x0);
    });
    std::vector<double> x, y;
    for (std::size_t i = 0; i < d.size(); ++i) {
        r.rows.push_back({d[i], "fdm", "u-center", u[i], 0.0});
        if (!(u[i] > 0.0)) throw SolverError("u_{delta,V} is not positive at x0; decay fit impossible");
        x.push_back(1.0 / std::sqrt(d[i]));
        y.push_back(std::log(u[i]));
    }
    const LinearModelFit f = fit_line(x, y, opts.seed, opts.resamples);
    const double slope = f.coefficients[1];
    r.diagnostics.push_back("slope " + fmt(slope) + " CI [" + fmt(f.ci_lo[1]) + ", " + fmt(f.ci_hi[1]) + "]");
    r.checks.push_back({"decay-negative", slope < 0.0, true, "slope " + fmt(slope)});
    const CoefficientSet& c = p.coeffs;
    if (c.dimension() == 1 && c.diffusion().constant_diffusion() && c.V().is_constant() && c.diffusion().zero_drift()) {
        const double a = c.diffusion().a_at(p.x0).xx, V = c.V()(p.x0);
        const double target = -p.domain.signed_distance(p.x0) * std::sqrt(2.0 * V / a);
        r.prefactor = slope;
        r.prefactor_target = target;
        r.checks.push_back(tolerance_check("decay-slope", slope, target, 0.05));
    }
    return r;
}

SweepResult run_local_mass_experiment(const ProblemSpec& p, const ExperimentOptions& opts) {
    const std::vector<double> d = sorted_deltas(opts, 1);
    if (!p.theory_applies) throw ConfigError("the boundary-limit theory does not apply to " + p.name);
    const int k = p.coeffs.k();
    const double target = local_exit_mass_limit(p.coeffs, k, default_boundary_quadrature(p.domain));
    SweepResult r = start("local-mass", p);
    r.target_exponent = 0.5 * (k + 1);
    const auto mass = sweep<double>(d.size(), opts.threads, [&](std::size_t i) {
        const GridFunction u = solve_u_delta_V(d[i], p.coeffs, experiment_grid(p, d[i], opts), opts.fdm);
        return integrate_mu(u, p.coeffs) * std::pow(d[i], -r.target_exponent);
    });
    for (std::size_t i = 0; i < d.size(); ++i) r.rows.push_back({d[i], "fdm", "local-mass", mass[i], 0.0});
    r.rows.push_back({d.back(), "theory", "local-mass", target, 0.0});
    r.prefactor = mass.back();
    r.prefactor_target = target;
    r.checks.push_back(tolerance_check("local-mass-limit", mass.back(), target, 0.03));
    return r;
}

SweepResult run_open_question_probe(int m, const ExperimentOptions& opts) {
    const ProblemSpec p = vanishing_V_problem(m);
    const std::vector<double> d = sorted_deltas(opts, 3);
    SweepResult r = start("probe", p);
    struct Outcome {
        double lambda;
        std::string error;
    };
    const auto out = sweep<Outcome>(d.size(), opts.threads, [&](std::size_t i) {
        try {
            return Outcome{principal_eigenvalue(d[i], p.coeffs, experiment_grid(p, d[i], opts), opts.fdm).lambda0, ""};
        } catch (const SolverError& e) {
            return Outcome{0.0, e.what()};
        }
    });
    std::vector<double> dd, lam;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!out[i].error.empty()) {
            r.diagnostics.push_back("eigen solve failed at delta " + fmt(d[i]) +
                                    " (near-degenerate spectrum?): " + out[i].error);
            continue;
        }
        r.rows.push_back({d[i], "fdm", "lambda0", out[i].lambda, 0.0});
        dd.push_back(d[i]);
        lam.push_back(out[i].lambda);
    }
    if (dd.size() >= 3) {
        r.fit = fit_exponent(dd, lam, opts.seed, opts.resamples);
        add_fit_diagnostics(r);
        r.prefactor = lam.back() * std::pow(dd.back(), -r.fit->exponent);
        if (m == 0)
            r.checks.push_back({"reduces-to-k0", r.fit->contains(0.5), false, "exponent CI contains 0.5"});
    } else {
        r.diagnostics.push_back("fewer than 3 successful eigen solves; no exponent reported");
    }
    return r;
}

ProbeSeries run_probe_series(const std::vector<int>& orders, const ExperimentOptions& opts) {
    if (orders.empty()) throw ConfigError("probe needs at least one vanishing order");
    ProbeSeries s;
    s.orders = orders;
    for (int m : orders) s.runs.push_back(run_open_question_probe(m, opts));
    const SweepResult& first = s.runs.front();
    const SweepResult& last = s.runs.back();
    s.ordering.name = "probe-ordering";
    s.ordering.asserted = false;
    if (first.fit && last.fit) {
        s.ordering.pass = first.fit->exponent < last.fit->exponent;
        s.ordering.detail = "alpha(" + std::to_string(orders.front()) + ") = " + fmt(first.fit->exponent) +
                            (s.ordering.pass ? " < " : " >= ") + "alpha(" + std::to_string(orders.back()) +
                            ") = " + fmt(last.fit->exponent);
    } else {
        s.ordering.detail = "missing exponent estimate";
    }
    s.runs.back().checks.push_back(s.ordering);
    return s;
}

SweepResult compare_mc_fdm(const ProblemSpec& p, double delta, Point x, const SimConfig& cfg,
                           const ExperimentOptions& opts) {
    SimConfig c = cfg;
    c.delta = delta;
    SweepResult r = start("compare-mc-fdm", p);
    const ExitLawEstimate e = estimate_exit_law(x, p.coeffs, p.domain, c, p.domain.dimension() == 1 ? 2 : 36);
    const double phi = solve_dirichlet_nonlocal(delta, p.coeffs, experiment_grid(p, delta, opts), opts.fdm).at(x);
    r.rows.push_back({delta, "mc", "phi", e.mean_f, e.stderr_f});
    r.rows.push_back({delta, "fdm", "phi", phi, 0.0});
    const double gap = std::abs(e.mean_f - phi);
    const double z = e.stderr_f > 0.0 ? gap / e.stderr_f : (gap <= 1e-9 ? 0.0 : INFINITY);
    r.checks.push_back({"mc-vs-fdm", z <= 3.0, true,
                        "mc " + fmt(e.mean_f) + " +- " + fmt(e.stderr_f) + ", fdm " + fmt(phi) + ", |gap|/SE " +
                            fmt(z) + " (" + to_string(c.exit_mode) + ", dt " + fmt(c.dt) + ", " +
                            std::to_string(c.paths) + " paths)"});
    if (e.censored > 0) r.diagnostics.push_back(std::to_string(e.censored) + " paths censored");
    return r;
}

SweepResult compare_exit_before_jump(const ProblemSpec& p, double delta, const SimConfig& cfg,
                                     const ExperimentOptions& opts) {
    SimConfig c = cfg;
    c.delta = delta;
    SweepResult r = start("exit-before-jump", p);
    const BernoulliEstimate b = estimate_exit_before_jump(p.coeffs, p.domain, c);
    const double mass =
        integrate_mu(solve_u_delta_V(delta, p.coeffs, experiment_grid(p, delta, opts), opts.fdm), p.coeffs);
    r.rows.push_back({delta, "mc", "exit-before-jump", b.p, b.stderr_p});
    r.rows.push_back({delta, "fdm", "exit-before-jump", mass, 0.0});
    const double gap = std::abs(b.p - mass);
    const double z = b.stderr_p > 0.0 ? gap / b.stderr_p : (gap <= 1e-9 ? 0.0 : INFINITY);
    r.checks.push_back({"exit-before-jump", z <= 3.0, true,
                        "mc " + fmt(b.p) + " +- " + fmt(b.stderr_p) + ", integral of u d mu " + fmt(mass) +
                            ", |gap|/SE " + fmt(z)});
    return r;
}

// ---------------------------------------------------------------------------

void write_rows_csv(std::ostream& os, const SweepResult& result, const std::string& quantity) {
    os << "delta,method,quantity,value,stderr\n";
    char buf[128];
    for (const SweepRow& row : result.rows) {
        if (!quantity.empty() && row.quantity != quantity) continue;
        std::snprintf(buf, sizeof buf, "%.17g", row.delta);
        os << buf << ',' << row.method << ',' << row.quantity << ',';
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", row.value, row.stderr_value);
        os << buf << '\n';
    }
}

std::string summary_json(const std::vector<SweepResult>& results) {
    json out;
    out["results"] = json::array();
    bool all = true;
    for (const SweepResult& r : results) {
        json j{{"experiment", r.experiment}, {"problem", r.problem}, {"pass", r.passed()}};
        if (r.fit) j["fit"] = fit_json(*r.fit);
        if (r.target_exponent != 0.0) j["target_exponent"] = r.target_exponent;
        if (r.prefactor_target != 0.0) {
            j["prefactor"] = r.prefactor;
            j["prefactor_target"] = r.prefactor_target;
        }
        j["checks"] = json::array();
        for (const Check& c : r.checks)
            j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"asserted", c.asserted}, {"detail", c.detail}});
        j["diagnostics"] = r.diagnostics;
        out["results"].push_back(j);
        all = all && r.passed();
    }
    out["pass"] = all;
    return out.dump(2) + "\n";
}

void write_outputs(const std::string& dir, const std::vector<SweepResult>& results) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const SweepResult& r : results) {
        std::vector<std::string> quantities;
        for (const SweepRow& row : r.rows)
            if (std::find(quantities.begin(), quantities.end(), row.quantity) == quantities.end())
                quantities.push_back(row.quantity);
        for (const std::string& q : quantities) {
            std::ofstream os(fs::path(dir) / (safe_name(r.experiment + "_" + r.problem + "_" + q) + ".csv"));
            if (!os) throw Error("cannot write to " + dir);
            write_rows_csv(os, r, q);
        }
    }
    std::ofstream os(fs::path(dir) / "summary.json");
    if (!os) throw Error("cannot write to " + dir);
    os << summary_json(results);
}

std::string parse_experiment_options(const std::string& json_text, ExperimentOptions& opts) {
    json doc;
    try {
        doc = json::parse(json_text, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    std::string type = "thm2";
    try {
        if (doc.contains("seed")) opts.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("experiment")) {
            const json& e = doc["experiment"];
            if (e.contains("type")) type = e["type"].get<std::string>();
            if (e.contains("deltas")) opts.deltas = e["deltas"].get<std::vector<double>>();
            if (e.contains("resamples")) opts.resamples = e["resamples"].get<int>();
            if (e.contains("threads")) opts.threads = e["threads"].get<int>();
        }
        if (doc.contains("solver")) {
            const json& s = doc["solver"];
            if (s.contains("grid_factor")) opts.grid_factor = s["grid_factor"].get<double>();
            if (s.contains("min_cells")) opts.min_cells = s["min_cells"].get<int>();
            if (s.contains("angular")) opts.angular = s["angular"].get<int>();
            if (s.contains("grid_n")) opts.grid_n = s["grid_n"].get<int>();
            if (s.contains("allow_underresolved")) opts.fdm.allow_underresolved = s["allow_underresolved"].get<bool>();
            if (s.contains("linear")) {
                const std::string l = s["linear"].get<std::string>();
                if (l == "auto") opts.fdm.solver = LinearSolverKind::Auto;
                else if (l == "sparse-lu") opts.fdm.solver = LinearSolverKind::SparseLU;
                else if (l == "bicgstab") opts.fdm.solver = LinearSolverKind::BiCGSTAB;
                else throw ConfigError("unknown linear solver: " + l);
            }
        }
        if (doc.contains("mc")) {
            const json& m = doc["mc"];
            if (m.contains("enabled")) opts.run_mc = m["enabled"].get<bool>();
            if (m.contains("paths")) opts.mc.paths = m["paths"].get<std::int64_t>();
            if (m.contains("dt")) opts.mc.dt = m["dt"].get<double>();
            if (m.contains("seed")) opts.mc.seed = m["seed"].get<std::uint64_t>();
            if (m.contains("max_steps")) {
                opts.mc.max_steps = m["max_steps"].get<std::int64_t>();
                opts.auto_exit_mode = false;
            }
            if (m.contains("exit_mode")) {
                opts.mc.exit_mode = parse_exit_detection(m["exit_mode"].get<std::string>());
                opts.auto_exit_mode = false;
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    if (opts.grid_factor <= 0.0 || opts.min_cells < 2 || opts.resamples < 0) throw ConfigError("bad solver settings");
    return type;
}

} // namespace jumpdiff
