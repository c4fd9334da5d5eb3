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

#include <cstdint>
#include <span>
#include <vector>

namespace jumpdiff {

/// Least-squares fit of y against the columns of a design matrix, with a
/// residual-bootstrap percentile interval for every coefficient.
struct LinearModelFit {
    std::vector<double> coefficients;
    std::vector<double> ci_lo; ///< 2.5% bootstrap percentile
    std::vector<double> ci_hi; ///< 97.5% bootstrap percentile
    std::vector<double> residuals;
    double rms = 0.0;
    double r_squared = 0.0;
    int resamples = 0;
};

/// columns[j][i] is regressor j at observation i. Needs more observations
/// than columns for a non-degenerate interval; with exactly as many the
/// interval collapses to the point estimate. Resampling is driven by a
/// counter-based stream keyed by `seed`, so the result is reproducible.
LinearModelFit fit_linear_model(const std::vector<std::vector<double>>& columns, std::span<const double> y,
                                std::uint64_t seed, int resamples = 200);

/// y = intercept + slope x.
LinearModelFit fit_line(std::span<const double> x, std::span<const double> y, std::uint64_t seed,
                        int resamples = 200);

/// Exponent alpha of value ~ C delta^alpha.
///
/// The primary model is log value = c + alpha log delta + beta delta^{1/2},
/// which absorbs the leading boundary-layer correction (pure power-law fits
/// are biased by it). The interval is the bootstrap percentile interval of
/// alpha widened on both sides by the truncation band |alpha - alpha'|,
/// where alpha' comes from the model with an extra delta term (or the pure
/// power law when there are fewer than 5 points). With only 3 points the
/// pure power law is the primary model.
///
/// Before fitting, the largest delta is dropped when its leave-one-out
/// residual (prediction from a fit of the other points) exceeds 3 times that
/// fit's RMS residual, floored at 1e-9 (needs 4+ points).
struct ExponentFit {
    double exponent = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double log_prefactor = 0.0; ///< c of the primary model
    double truncation_band = 0.0;
    double bootstrap_lo = 0.0; ///< un-widened interval
    double bootstrap_hi = 0.0;
    /// Diagnostics: the plain power-law slope and its bootstrap interval.
    double pure_exponent = 0.0;
    double pure_ci_lo = 0.0;
    double pure_ci_hi = 0.0;
    bool excluded_largest = false;
    std::vector<double> deltas_used;
    int resamples = 0;

    bool contains(double alpha) const { return ci_lo <= alpha && alpha <= ci_hi; }
};

/// Throws ConfigError with fewer than 3 points or non-positive data.
ExponentFit fit_exponent(std::span<const double> delta, std::span<const double> value, std::uint64_t seed,
                         int resamples = 200);

} // namespace jumpdiff
