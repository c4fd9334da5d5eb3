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
#include "jumpdiff/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace jumpdiff {

enum class ExitDetection {
    FirstCrossing,     ///< exit when an Euler step lands outside D
    BridgeCorrected1D, ///< also test for an intra-step crossing (1D only)
};

ExitDetection parse_exit_detection(const std::string& name);
std::string to_string(ExitDetection mode);

struct SimConfig {
    double delta = 0.05;
    double dt = 1e-4;
    std::int64_t paths = 10000;
    std::uint64_t seed = 20260101;
    ExitDetection exit_mode = ExitDetection::FirstCrossing;
    /// Censoring horizon in steps; horizon time is max_steps * dt.
    std::int64_t max_steps = 1'000'000;

    double horizon() const { return static_cast<double>(max_steps) * dt; }
    /// Throws ConfigError on non-positive delta/dt/paths or horizon overflow.
    void validate() const;
};

struct ExitSample {
    Point exit_point{};
    double exit_time = 0.0; ///< tau_D, or the stopping time for censored / jumped samples
    std::int64_t jumps = 0;
    std::int64_t path = 0;
    bool exited = false;   ///< reached the boundary
    bool censored = false; ///< hit the horizon first
    double first_jump_time = -1.0; ///< negative when the path never jumped
};

struct SurvivalPoint {
    double t = 0.0;
    double survival = 0.0; ///< P(tau > t); NaN beyond the censoring horizon
};

struct ExitLawEstimate {
    std::vector<double> bin_edges;          ///< boundary_parameter bin edges
    std::vector<double> bin_probabilities;  ///< over non-censored paths
    double mean_f = 0.0;
    double stderr_f = 0.0;
    double mean_jumps = 0.0;
    double zero_jump_fraction = 0.0; ///< exited before the first jump
    double mean_exit_time = 0.0;
    std::int64_t exited = 0;
    std::int64_t censored = 0;
    std::vector<SurvivalPoint> survival;
};

struct SurvivalFit {
    double rate = 0.0; ///< lambda-hat = -slope of log P(tau > t)
    double r_squared = 0.0;
    double window_lo = 0.0; ///< first / last t used
    double window_hi = 0.0;
    int points = 0;
};

/// Rejection sampler for the density mu: uniform proposals on the bounding
/// box, accepted with probability mu(x) / M, with M 1.05 times the largest
/// density seen on a dense sample.
class MuSampler {
public:
    MuSampler(const CoefficientSet& coeffs, const Domain& domain);
    Point sample(RandomStream& rng) const;
    double bound() const { return bound_; }
    /// Expected acceptance probability 1 / (M |box|).
    double acceptance_rate() const { return acceptance_; }

private:
    ScalarField mu_;
    Domain domain_;
    Point box_lo_, box_hi_;
    double bound_ = 0.0;
    double acceptance_ = 0.0;
};

Point sample_mu(const MuSampler& sampler, RandomStream& rng);

/// One Euler step of the delta L diffusion in non-divergence form:
/// x + delta B(x) dt + sqrt(delta dt) sigma(x) xi.
Point step_euler(Point x, const CoefficientSet& coeffs, double delta, double dt, RandomStream& rng);

/// Simulates paths of the jump diffusion. Holds the precomputed drift,
/// diffusion root and mu sampler; immutable and safe to share across threads.
class PathSimulator {
public:
    PathSimulator(const CoefficientSet& coeffs, const Domain& domain, const SimConfig& cfg);

    /// Full path from x0 until exit or censoring.
    ExitSample run_path(Point x0, std::int64_t path_index) const;
    /// One diffusion segment started from mu, stopped at the first jump or exit.
    ExitSample run_segment(std::int64_t path_index) const;

    const SimConfig& config() const { return cfg_; }
    const Domain& domain() const { return domain_; }
    const CoefficientSet& coefficients() const { return coeffs_; }

private:
    ExitSample simulate(Point x, RandomStream& rng, std::int64_t path_index, bool stop_at_jump) const;
    Point step(Point x, RandomStream& rng) const;

    CoefficientSet coeffs_;
    Domain domain_;
    SimConfig cfg_;
    MuSampler sampler_;
    std::array<ScalarField, 2> drift_;
    bool const_sigma_ = false;
    bool const_drift_ = false;
    bool const_V_ = false;
    Mat2 sigma0_{};
    Point drift0_{};
    double V0_ = 0.0;
    double step_scale_ = 0.0; ///< sqrt(delta dt)
};

enum class PathStart {
    FromPoint, ///< run_path from x0
    FromMu,    ///< run_segment
};

/// Reference implementation: paths in index order on the calling thread.
std::vector<ExitSample> simulate_paths_serial(const PathSimulator& sim, PathStart start, Point x0 = {});
/// OpenMP version; bit-identical to the serial one for any thread count.
std::vector<ExitSample> simulate_paths(const PathSimulator& sim, PathStart start, Point x0 = {},
                                       int threads = 0);

/// Deterministic ordered reduction of per-path samples.
ExitLawEstimate aggregate_exit_law(std::span<const ExitSample> samples, const Domain& domain, const ScalarField& f,
                                   int bins, std::span<const double> t_grid);

/// Single path from x0 with the stream of `path_index`.
ExitSample run_path(Point x0, const CoefficientSet& coeffs, const Domain& domain, const SimConfig& cfg,
                    std::int64_t path_index);

/// N independent paths from x0. Throws Error when every path is censored.
ExitLawEstimate estimate_exit_law(Point x0, const CoefficientSet& coeffs, const Domain& domain,
                                  const SimConfig& cfg, int bins, std::span<const double> t_grid = {});

struct BernoulliEstimate {
    double p = 0.0;
    double stderr_p = 0.0;
    std::int64_t n = 0;
};

/// P(a diffusion segment started from mu exits before its first jump).
BernoulliEstimate estimate_exit_before_jump(const CoefficientSet& coeffs, const Domain& domain, const SimConfig& cfg);

/// Slope of log P(tau > t) over the grid points with 0.01 <= P <= 0.2.
/// Throws Error with fewer than 4 usable points.
SurvivalFit estimate_survival_rate(std::span<const SurvivalPoint> curve, double p_lo = 0.01, double p_hi = 0.2);

/// Per-path CSV: path,x,y,tau,jumps,exited,censored
void write_samples_csv(std::ostream& os, std::span<const ExitSample> samples);

} // namespace jumpdiff
