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

#include <string>
#include <vector>

namespace jumpdiff {

/// A validated problem: domain, coefficients with the declared vanishing
/// order k, and the evaluation points used by the exit-law experiments.
struct ProblemSpec {
    std::string name;
    Domain domain;
    CoefficientSet coeffs;
    Point x0{}; ///< primary evaluation point
    Point x1{}; ///< second point for the x-independence check
    /// False when V vanishes somewhere on the closure (probe problems); the
    /// boundary-limit formulas do not apply then.
    bool theory_applies = true;
};

/// Checks the declared vanishing order of mu against the boundary data and
/// throws CoefficientError when it fails. x0 and x1 default to points at
/// 1/2 and 1/4 of the way across the domain.
ProblemSpec make_problem(std::string name, const Domain& domain, const CoefficientSet& coeffs,
                         bool theory_applies = true);

/// interval-k0-uniform, interval-k0-asym, interval-k1-beta22,
/// interval-k2-quartic, interval-flux-a2v3, square-k0-uniform,
/// disk-k0-radial, annulus-flux, probe-Vm1, probe-Vm2, probe-Vm3.
std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ProblemSpec preset(const std::string& name);

/// 1D problem on (0, 1) with a = 1, mu = 1 and V = (2 dist(x, dD))^m, which
/// vanishes to order m at both ends (m = 0 gives V = 1).
ProblemSpec vanishing_V_problem(int m);

/// Field grammar (JSON):
///   1.5                                     constant
///   {"poly": [[c, px, py], ...]}            sum of c x^px y^py
///   {"sin"|"cos": [wx, wy], "phase": p, "amplitude": s}
///   {"exp": [rx, ry], "amplitude": s}
///   {"dist": m}                             dist(x, dD)^m
///   {"sum": [F, ...]}, {"product": [F, ...]}, {"scale": s, "field": F}
ScalarField parse_field(const std::string& json_text, const Domain& domain);

/// {"type": "interval", "lo": 0, "hi": 1}, {"type": "rectangle", "lower":
/// [x, y], "upper": [x, y]}, {"type": "disk", "center": [x, y], "radius": r},
/// {"type": "annulus", "center": [x, y], "inner": r0, "outer": r1}.
Domain parse_domain(const std::string& json_text);

/// Problem from a config document with sections "domain", "coefficients"
/// ({"a": F or {"a11", "a12", "a22"}, "b": [F, F], "V", "mu", "f"}), "k",
/// and optional "x0", "x1", "name". A "preset" key without those sections
/// selects the preset (x0 and x1 may still be overridden).
ProblemSpec parse_problem(const std::string& json_text);

} // namespace jumpdiff
