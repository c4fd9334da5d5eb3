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

#include "jumpdiff/mc.hpp"

#include "jumpdiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jumpdiff {

ExitDetection parse_exit_detection(const std::string& name) {
    if (name == "first-crossing") return ExitDetection::FirstCrossing;
    if (name == "bridge-corrected-1d" || name == "bridge") return ExitDetection::BridgeCorrected1D;
    throw ConfigError("unknown exit-detection mode '" + name + "'");
}

std::string to_string(ExitDetection mode) {
    return mode == ExitDetection::FirstCrossing ? "first-crossing" : "bridge-corrected-1d";
}

void SimConfig::validate() const {
    if (!(delta > 0.0)) throw ConfigError("mc: delta must be positive");
    if (!(dt > 0.0)) throw ConfigError("mc: dt must be positive");
    if (paths < 1) throw ConfigError("mc: path count must be >= 1");
    if (max_steps < 1) throw ConfigError("mc: max_steps must be >= 1");
    if (!std::isfinite(horizon()) || horizon() > 1e300) throw ConfigError("mc: censoring horizon overflows");
}

// ---------------------------------------------------------------------------

MuSampler::MuSampler(const CoefficientSet& coeffs, const Domain& domain) : mu_(coeffs.mu()), domain_(domain) {
    std::tie(box_lo_, box_hi_) = domain.bounding_box();
    const int dim = domain.dimension();
    const int n = dim == 1 ? 20001 : 301;
    const double hx = (box_hi_.x - box_lo_.x) / (n - 1);
    const double hy = dim == 1 ? 1.0 : (box_hi_.y - box_lo_.y) / (n - 1);
    double peak = 0.0;
    double mass = 0.0;
    for (int j = 0; j < (dim == 1 ? 1 : n); ++j) {
        for (int i = 0; i < n; ++i) {
            const Point p{box_lo_.x + i * hx, dim == 1 ? 0.0 : box_lo_.y + j * hy};
            if (domain.signed_distance(p) < -domain.boundary_tolerance()) continue;
            const double m = mu_(p);
            peak = std::max(peak, m);
            mass += m * hx * hy;
        }
    }
    if (!(peak > 0.0)) throw ConfigError("mu sampler: density is zero on the sample grid");
    bound_ = 1.05 * peak;
    const double box_measure = (box_hi_.x - box_lo_.x) * (dim == 1 ? 1.0 : (box_hi_.y - box_lo_.y));
    acceptance_ = mass / (bound_ * box_measure);
    if (acceptance_ < 1e-4)
        throw ConfigError("mu sampler: acceptance rate " + std::to_string(acceptance_) +
                          " below 1e-4; density too peaked for rejection sampling");
}

Point MuSampler::sample(RandomStream& rng) const {
    const bool two_d = domain_.dimension() == 2;
    for (long attempt = 0; attempt < 100'000'000L; ++attempt) {
        Point p{box_lo_.x + (box_hi_.x - box_lo_.x) * rng.uniform(), 0.0};
        if (two_d) p.y = box_lo_.y + (box_hi_.y - box_lo_.y) * rng.uniform();
        const double u = rng.uniform();
        if (!domain_.contains(p)) continue;
        if (u * bound_ < mu_(p)) return p;
    }
    throw Error("mu sampler: no acceptance after 1e8 proposals");
}

Point sample_mu(const MuSampler& sampler, RandomStream& rng) { return sampler.sample(rng); }

Point step_euler(Point x, const CoefficientSet& coeffs, double delta, double dt, RandomStream& rng) {
    // Pointwise drift; PathSimulator caches the drift fields instead.
    const MatrixField& m = coeffs.diffusion();
    const int dim = coeffs.dimension();
    double B[2] = {0.0, 0.0};
    for (int j = 0; j < dim; ++j) {
        B[j] = m.b(j)(x);
        for (int i = 0; i < dim; ++i) B[j] += 0.5 * m.a(i, j).eval(x, unit_index(i));
    }
    const Mat2 s = diffusion_root(coeffs, x);
    const double scale = std::sqrt(delta * dt);
    const double xi1 = rng.normal();
    if (dim == 1) return {x.x + delta * B[0] * dt + scale * s.xx * xi1, 0.0};
    const double xi2 = rng.normal();
    return {x.x + delta * B[0] * dt + scale * s.xx * xi1,
            x.y + delta * B[1] * dt + scale * (s.yx * xi1 + s.yy * xi2)};
}

// ---------------------------------------------------------------------------

PathSimulator::PathSimulator(const CoefficientSet& coeffs, const Domain& domain, const SimConfig& cfg)
    : coeffs_(coeffs), domain_(domain), cfg_(cfg), sampler_(coeffs, domain),
      drift_(nondivergence_drift(coeffs)) {
    cfg_.validate();
    if (cfg_.exit_mode == ExitDetection::BridgeCorrected1D && domain.dimension() != 1)
        throw ConfigError("bridge-corrected exit detection is only available in 1D");
    const_sigma_ = coeffs.diffusion().constant_diffusion();
    const_drift_ = drift_[0].is_constant() && drift_[1].is_constant();
    const_V_ = coeffs.V().is_constant();
    if (const_sigma_) sigma0_ = diffusion_root(coeffs, domain.center());
    if (const_drift_) drift0_ = {drift_[0](Point{}), domain.dimension() == 2 ? drift_[1](Point{}) : 0.0};
    if (const_V_) V0_ = coeffs.V()(Point{});
    step_scale_ = std::sqrt(cfg_.delta * cfg_.dt);
}

Point PathSimulator::step(Point x, RandomStream& rng) const {
    const Point B = const_drift_ ? drift0_
                                 : Point{drift_[0](x), domain_.dimension() == 2 ? drift_[1](x) : 0.0};
    const Mat2 s = const_sigma_ ? sigma0_ : diffusion_root(coeffs_, x);
    const double scale = step_scale_;
    const double mean = cfg_.delta * cfg_.dt;
    const double xi1 = rng.normal();
    if (domain_.dimension() == 1) return {x.x + mean * B.x + scale * s.xx * xi1, 0.0};
    const double xi2 = rng.normal();
    return {x.x + mean * B.x + scale * s.xx * xi1, x.y + mean * B.y + scale * (s.yx * xi1 + s.yy * xi2)};
}

ExitSample PathSimulator::simulate(Point x, RandomStream& rng, std::int64_t path_index, bool stop_at_jump) const {
    ExitSample out;
    out.path = path_index;
    const double dt = cfg_.dt;
    const bool bridge = cfg_.exit_mode == ExitDetection::BridgeCorrected1D;
    const double lo = domain_.lower().x;
    const double hi = domain_.upper().x;

    double threshold = rng.exponential();
    double clock = 0.0;
    double t = 0.0;
    for (std::int64_t n = 0; n < cfg_.max_steps; ++n) {
        const Point next = step(x, rng);
        // Left-endpoint Riemann sum of V along the path.
        clock += (const_V_ ? V0_ : coeffs_.V()(x)) * dt;
        t = static_cast<double>(n + 1) * dt;
        if (clock >= threshold) {
            ++out.jumps;
            if (out.first_jump_time < 0.0) out.first_jump_time = t;
            if (stop_at_jump) {
                out.exit_time = t;
                return out;
            }
            x = sampler_.sample(rng);
            clock = 0.0;
            threshold = rng.exponential();
            continue;
        }
        if (!domain_.contains(next)) {
            out.exited = true;
            out.exit_time = t;
            out.exit_point = domain_.project_to_boundary(next);
            return out;
        }
        if (bridge) {
            // Brownian bridge crossing probability towards each endpoint.
            const double var = cfg_.delta * (const_sigma_ ? sigma0_.xx * sigma0_.xx : coeffs_.diffusion().a_at(x).xx) * dt;
            const double e_lo = 2.0 * (x.x - lo) * (next.x - lo) / var;
            const double e_hi = 2.0 * (hi - x.x) * (hi - next.x) / var;
            // Crossings less likely than e^-40 are ignored; this skips the
            // draw on almost every step away from the boundary.
            if (std::min(e_lo, e_hi) > 40.0) {
                x = next;
                continue;
            }
            const double p_lo = std::exp(-e_lo);
            const double p_hi = std::exp(-e_hi);
            const double u = rng.uniform();
            if (u < p_lo + p_hi) {
                out.exited = true;
                out.exit_time = t;
                out.exit_point = {u < p_lo ? lo : hi, 0.0};
                return out;
            }
        }
        x = next;
    }
    out.censored = true;
    out.exit_time = cfg_.horizon();
    return out;
}

ExitSample PathSimulator::run_path(Point x0, std::int64_t path_index) const {
    if (!domain_.contains(x0)) throw ConfigError("run_path: starting point is not inside the domain");
    RandomStream rng(cfg_.seed, static_cast<std::uint64_t>(path_index));
    return simulate(x0, rng, path_index, false);
}

ExitSample PathSimulator::run_segment(std::int64_t path_index) const {
    RandomStream rng(cfg_.seed, static_cast<std::uint64_t>(path_index));
    const Point x0 = sampler_.sample(rng);
    return simulate(x0, rng, path_index, true);
}

ExitSample run_path(Point x0, const CoefficientSet& coeffs, const Domain& domain, const SimConfig& cfg,
                    std::int64_t path_index) {
    return PathSimulator(coeffs, domain, cfg).run_path(x0, path_index);
}

std::vector<ExitSample> simulate_paths_serial(const PathSimulator& sim, PathStart start, Point x0) {
    const std::int64_t n = sim.config().paths;
    std::vector<ExitSample> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = start == PathStart::FromPoint ? sim.run_path(x0, i) : sim.run_segment(i);
    return out;
}

std::vector<ExitSample> simulate_paths(const PathSimulator& sim, PathStart start, Point x0, int threads) {
    if (start == PathStart::FromPoint && !sim.domain().contains(x0))
        throw ConfigError("simulate_paths: starting point is not inside the domain");
    const std::int64_t n = sim.config().paths;
    std::vector<ExitSample> out(static_cast<std::size_t>(n));
#ifdef _OPENMP
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 64) num_threads(nthreads)
#endif
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = start == PathStart::FromPoint ? sim.run_path(x0, i) : sim.run_segment(i);
    (void)threads;
    return out;
}

ExitLawEstimate aggregate_exit_law(std::span<const ExitSample> samples, const Domain& domain, const ScalarField& f,
                                   int bins, std::span<const double> t_grid) {
    if (bins < 1) throw ConfigError("exit law: need at least one bin");
    ExitLawEstimate est;
    const auto [p_lo, p_hi] = domain.boundary_parameter_range();
    for (int b = 0; b <= bins; ++b) est.bin_edges.push_back(p_lo + (p_hi - p_lo) * b / bins);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);

    double sum_f = 0.0, sum_jumps = 0.0, sum_tau = 0.0;
    std::int64_t zero_jumps = 0;
    std::vector<double> fvals;
    fvals.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.censored) {
            ++est.censored;
            continue;
        }
        if (!s.exited) continue;
        ++est.exited;
        const double fv = f(s.exit_point);
        fvals.push_back(fv);
        sum_f += fv;
        sum_jumps += static_cast<double>(s.jumps);
        sum_tau += s.exit_time;
        if (s.jumps == 0) ++zero_jumps;
        const double par = domain.boundary_parameter(s.exit_point);
        auto b = static_cast<int>((par - p_lo) / (p_hi - p_lo) * bins);
        counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))]++;
    }
    if (est.exited == 0) throw Error("exit law: every path was censored");
    const auto n = static_cast<double>(est.exited);
    est.mean_f = sum_f / n;
    double ss = 0.0;
    for (double v : fvals) ss += (v - est.mean_f) * (v - est.mean_f);
    est.stderr_f = est.exited > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    est.mean_jumps = sum_jumps / n;
    est.mean_exit_time = sum_tau / n;
    est.zero_jump_fraction = static_cast<double>(zero_jumps) / n;
    for (auto c : counts) est.bin_probabilities.push_back(static_cast<double>(c) / n);

    double horizon = std::numeric_limits<double>::infinity();
    for (const auto& s : samples)
        if (s.censored) horizon = std::min(horizon, s.exit_time);
    const auto total = static_cast<double>(samples.size());
    for (double t : t_grid) {
        SurvivalPoint sp{t, std::numeric_limits<double>::quiet_NaN()};
        if (t <= horizon) {
            std::int64_t alive = 0;
            for (const auto& s : samples)
                if (s.censored || s.exit_time > t) ++alive;
            sp.survival = static_cast<double>(alive) / total;
        }
        est.survival.push_back(sp);
    }
    return est;
}

ExitLawEstimate estimate_exit_law(Point x0, const CoefficientSet& coeffs, const Domain& domain,
                                  const SimConfig& cfg, int bins, std::span<const double> t_grid) {
    const PathSimulator sim(coeffs, domain, cfg);
    const auto samples = simulate_paths(sim, PathStart::FromPoint, x0);
    return aggregate_exit_law(samples, domain, coeffs.f(), bins, t_grid);
}

BernoulliEstimate estimate_exit_before_jump(const CoefficientSet& coeffs, const Domain& domain,
                                            const SimConfig& cfg) {
    const PathSimulator sim(coeffs, domain, cfg);
    const auto samples = simulate_paths(sim, PathStart::FromMu);
    BernoulliEstimate est;
    std::int64_t hits = 0;
    for (const auto& s : samples) {
        if (s.censored) continue;
        ++est.n;
        if (s.exited) ++hits;
    }
    if (est.n == 0) throw Error("exit-before-jump: every segment was censored");
    const auto n = static_cast<double>(est.n);
    est.p = static_cast<double>(hits) / n;
    est.stderr_p = std::sqrt(est.p * (1.0 - est.p) / n);
    return est;
}

SurvivalFit estimate_survival_rate(std::span<const SurvivalPoint> curve, double p_lo, double p_hi) {
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (!(curve[i].t > curve[i - 1].t)) throw ConfigError("survival fit: t-grid must be increasing");
    std::vector<double> ts, ys;
    for (const auto& p : curve) {
        if (std::isnan(p.survival) || p.survival < p_lo || p.survival > p_hi) continue;
        ts.push_back(p.t);
        ys.push_back(std::log(p.survival));
    }
    if (ts.size() < 4) throw Error("survival fit: fewer than 4 grid points with P in the fit window");
    const auto n = static_cast<double>(ts.size());
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        my += ys[i];
    }
    mt /= n;
    my /= n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        sty += (ts[i] - mt) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    SurvivalFit fit;
    const double slope = sty / stt;
    fit.rate = -slope;
    fit.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
    fit.window_lo = ts.front();
    fit.window_hi = ts.back();
    fit.points = static_cast<int>(ts.size());
    return fit;
}

void write_samples_csv(std::ostream& os, std::span<const ExitSample> samples) {
    os << "path,x,y,tau,jumps,exited,censored\n";
    os.precision(17);
    for (const auto& s : samples)
        os << s.path << ',' << s.exit_point.x << ',' << s.exit_point.y << ',' << s.exit_time << ',' << s.jumps << ','
           << (s.exited ? 1 : 0) << ',' << (s.censored ? 1 : 0) << '\n';
}

} // namespace jumpdiff
