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

#include "jumpdiff/fdm.hpp"
#include "jumpdiff/fit.hpp"
#include "jumpdiff/mc.hpp"
#include "jumpdiff/problem.hpp"
#include "jumpdiff/theory.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jumpdiff {

/// {1e-2, 10^-2.5, 1e-3, 10^-3.5, 1e-4}
std::vector<double> default_deltas();

struct ExperimentOptions {
    std::vector<double> deltas = default_deltas();
    /// Grid: boundary_layer_grid(factor, min_cells, angular) unless grid_n > 0,
    /// which fixes n1 = grid_n cells.
    double grid_factor = 0.05;
    int min_cells = 200;
    int angular = 0;
    int grid_n = 0;
    FdmOptions fdm;
    /// Monte Carlo settings; delta is set per run. In 1D the harness switches
    /// to bridge-corrected exit detection when auto_exit_mode is set, and
    /// derives the censoring horizon from the predicted eigenvalue.
    SimConfig mc = default_mc();
    bool auto_exit_mode = true;
    bool run_mc = true;
    std::uint64_t seed = 20260101;
    int resamples = 200;
    int threads = 0; ///< sweep workers; 0 = OpenMP default

    static SimConfig default_mc();
};

struct SweepRow {
    double delta = 0.0;
    std::string method;   ///< fdm, mc, theory
    std::string quantity; ///< phi, lambda0, flux, u-center, local-mass, exit-before-jump
    double value = 0.0;
    double stderr_value = 0.0;
};

struct Check {
    std::string name;
    bool pass = false;
    bool asserted = true; ///< recorded-only checks never fail a run
    std::string detail;
};

struct SweepResult {
    std::string experiment;
    std::string problem;
    std::vector<SweepRow> rows;
    std::optional<ExponentFit> fit;
    double target_exponent = 0.0;
    double prefactor = 0.0;        ///< value at the smallest delta over delta^target_exponent
    double prefactor_target = 0.0; ///< theory value, 0 when not applicable
    std::vector<Check> checks;
    std::vector<std::string> diagnostics;

    bool passed() const;
    std::vector<double> values(const std::string& method, const std::string& quantity) const;
};

/// Grid used by every experiment for (problem, delta).
std::shared_ptr<const Grid> experiment_grid(const ProblemSpec& problem, double delta, const ExperimentOptions& opts);

TheoryResult problem_theory(const ProblemSpec& problem);

/// fdm phi(x0) per delta (and phi(x1) at the smallest), MC at the largest
/// delta, and a final theory row. Checks: phi at the smallest delta within
/// 2% of phi_0, error not larger than at the largest delta, x-independence.
SweepResult run_thm1_experiment(const ProblemSpec& problem, const ExperimentOptions& opts);

/// fdm lambda_0 per delta, exponent fit, prefactor at the smallest delta
/// against the theory constant. Tolerances for k = 0, 1, 2+: exponent
/// +-0.02/0.03/0.05 and CI containment, prefactor 2%/3%/5%.
SweepResult run_thm2_experiment(const ProblemSpec& problem, const ExperimentOptions& opts);

/// delta^{1/2} n . a grad u_{delta,V} per boundary node against
/// -sqrt(2 V n.a n). Checks the largest relative deviation (3%) at the
/// smallest delta, and when `uniformity_tolerance` > 0 the spread along each
/// boundary component.
SweepResult run_lemma_boundary_experiment(const ProblemSpec& problem, const ExperimentOptions& opts,
                                          double uniformity_tolerance = 0.0);

/// Slope of log u(center) against delta^{-1/2}; negative always, and for
/// constant 1D coefficients equal to -dist sqrt(2V/a) within 5%.
SweepResult run_decay_experiment(const ProblemSpec& problem, const ExperimentOptions& opts);

/// delta^{-(k+1)/2} times the integral of u_{delta,V} d mu against its
/// boundary limit (3% at the smallest delta).
SweepResult run_local_mass_experiment(const ProblemSpec& problem, const ExperimentOptions& opts);

/// Exponent of lambda_0 for V vanishing to order m at dD. Data only: the
/// checks it records are never asserted.
SweepResult run_open_question_probe(int m, const ExperimentOptions& opts);

struct ProbeSeries {
    std::vector<int> orders;
    std::vector<SweepResult> runs;
    Check ordering; ///< alpha(first) < alpha(last), recorded only
};
ProbeSeries run_probe_series(const std::vector<int>& orders, const ExperimentOptions& opts);

/// MC mean of f(X(tau)) from x against fdm phi(x); passes when the gap is at
/// most 3 standard errors.
SweepResult compare_mc_fdm(const ProblemSpec& problem, double delta, Point x, const SimConfig& cfg,
                           const ExperimentOptions& opts);

/// MC P(exit before first jump) against the discrete integral of u d mu.
SweepResult compare_exit_before_jump(const ProblemSpec& problem, double delta, const SimConfig& cfg,
                                     const ExperimentOptions& opts);

/// delta,method,quantity,value,stderr; rows of one quantity, or all when empty.
void write_rows_csv(std::ostream& os, const SweepResult& result, const std::string& quantity = "");
/// Fits, prefactors and checks of every result, plus the overall pass flag.
std::string summary_json(const std::vector<SweepResult>& results);
/// One CSV per quantity (<experiment>_<quantity>.csv) and summary.json in `dir`.
void write_outputs(const std::string& dir, const std::vector<SweepResult>& results);

/// Reads the "experiment", "solver" and "mc" sections of a config document
/// into `opts` and returns the experiment type (default "thm2").
std::string parse_experiment_options(const std::string& json_text, ExperimentOptions& opts);

} // namespace jumpdiff
