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

#include <stdexcept>
#include <string>

namespace jumpdiff {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: malformed config, invalid domain parameters, unknown preset.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A point that was required to lie on the boundary does not.
class BoundaryToleranceError : public Error {
public:
    using Error::Error;
};

/// A field was asked for a derivative beyond its declared order, or an
/// operator needs more smoothness than its argument provides.
class DerivativeOrderError : public Error {
public:
    using Error::Error;
};

/// Coefficient invariant violated (a not SPD, V not positive, mu not a density).
class CoefficientError : public Error {
public:
    using Error::Error;
};

/// Linear or eigen solver failure.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Grid too coarse for the boundary layer and no override given.
class ResolutionError : public Error {
public:
    using Error::Error;
};

} // namespace jumpdiff
