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

#include "jumpdiff/fit.hpp"

#include "jumpdiff/error.hpp"
#include "jumpdiff/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace jumpdiff {

namespace {

Eigen::VectorXd least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    return X.colPivHouseholderQr().solve(y);
}

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    return v[i] + (pos - static_cast<double>(i)) * (v[i + 1] - v[i]);
}

} // namespace

LinearModelFit fit_linear_model(const std::vector<std::vector<double>>& columns, std::span<const double> y,
                                std::uint64_t seed, int resamples) {
    const auto n = static_cast<Eigen::Index>(y.size());
    const auto p = static_cast<Eigen::Index>(columns.size());
    if (p == 0 || n < p) throw ConfigError("fit needs at least as many observations as coefficients");
    if (resamples < 0) throw ConfigError("resample count must be non-negative");
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        if (static_cast<Eigen::Index>(columns[static_cast<std::size_t>(j)].size()) != n)
            throw ConfigError("regressor length mismatch");
        for (Eigen::Index i = 0; i < n; ++i) X(i, j) = columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd Y = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    if (!X.allFinite() || !Y.allFinite()) throw ConfigError("fit data must be finite");

    const Eigen::VectorXd beta = least_squares(X, Y);
    const Eigen::VectorXd fitted = X * beta;
    const Eigen::VectorXd res = Y - fitted;

    LinearModelFit out;
    out.coefficients.assign(beta.data(), beta.data() + p);
    out.residuals.assign(res.data(), res.data() + n);
    out.rms = std::sqrt(res.squaredNorm() / static_cast<double>(n));
    const double ss_tot = (Y.array() - Y.mean()).square().sum();
    out.r_squared = ss_tot > 0.0 ? 1.0 - res.squaredNorm() / ss_tot : 1.0;
    out.resamples = resamples;

    // Residuals inflated by sqrt(n / (n - p)) to undo the shrinkage of the fit.
    const double inflate = n > p ? std::sqrt(static_cast<double>(n) / static_cast<double>(n - p)) : 0.0;
    std::vector<std::vector<double>> draws(static_cast<std::size_t>(p));
    RandomStream rng(seed, 0x6669745f626f6f74ULL);
    Eigen::VectorXd Yb(n);
    for (int r = 0; r < resamples; ++r) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto pick = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n));
            Yb(i) = fitted(i) + inflate * res(std::min(pick, n - 1));
        }
        const Eigen::VectorXd bb = least_squares(X, Yb);
        for (Eigen::Index j = 0; j < p; ++j) draws[static_cast<std::size_t>(j)].push_back(bb(j));
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        const auto& d = draws[static_cast<std::size_t>(j)];
        out.ci_lo.push_back(d.empty() ? beta(j) : std::min(beta(j), percentile(d, 0.025)));
        out.ci_hi.push_back(d.empty() ? beta(j) : std::max(beta(j), percentile(d, 0.975)));
    }
    return out;
}

LinearModelFit fit_line(std::span<const double> x, std::span<const double> y, std::uint64_t seed, int resamples) {
    std::vector<std::vector<double>> cols{std::vector<double>(x.size(), 1.0), {x.begin(), x.end()}};
    return fit_linear_model(cols, y, seed, resamples);
}

ExponentFit fit_exponent(std::span<const double> delta, std::span<const double> value, std::uint64_t seed,
                         int resamples) {
    if (delta.size() != value.size()) throw ConfigError("delta and value lengths differ");
    if (delta.size() < 3) throw ConfigError("an exponent fit needs at least 3 delta values");
    std::vector<std::size_t> order(delta.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!(delta[i] > 0.0) || !(value[i] > 0.0)) throw ConfigError("exponent fit needs positive delta and values");
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return delta[a] < delta[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (delta[order[i]] == delta[order[i - 1]]) throw ConfigError("exponent fit needs distinct delta values");

    std::vector<double> d, ld, lv;
    for (std::size_t i : order) {
        d.push_back(delta[i]);
        ld.push_back(std::log(delta[i]));
        lv.push_back(std::log(value[i]));
    }

    auto columns = [&](int extra) {
        std::vector<std::vector<double>> c{std::vector<double>(d.size(), 1.0), ld};
        if (extra >= 1) {
            c.emplace_back();
            for (double x : d) c.back().push_back(std::sqrt(x));
        }
        if (extra >= 2) c.push_back(d);
        return c;
    };
    auto primary_extra = [](std::size_t n) { return n >= 4 ? 1 : 0; };

    ExponentFit out;
    if (d.size() >= 4) {
        // Leave-one-out: predict the largest delta from a fit of the others.
        const std::size_t last = d.size() - 1;
        auto head = [&](const std::vector<double>& v) { return std::vector<double>(v.begin(), v.begin() + static_cast<long>(last)); };
        const std::vector<double> d_all = d, ld_all = ld;
        d = head(d_all);
        ld = head(ld_all);
        const LinearModelFit f = fit_linear_model(columns(primary_extra(last)), head(lv), seed, 0);
        double pred = 0.0;
        std::vector<double> row{1.0, ld_all[last], std::sqrt(d_all[last])};
        for (std::size_t j = 0; j < f.coefficients.size(); ++j) pred += f.coefficients[j] * row[j];
        // Floor keeps roundoff-level fits from rejecting points.
        if (std::abs(lv[last] - pred) > 3.0 * std::max(f.rms, 1e-9)) {
            lv.pop_back();
            out.excluded_largest = true;
        } else {
            d = d_all;
            ld = ld_all;
        }
    }
    out.deltas_used = d;

    const int extra = primary_extra(d.size());
    const LinearModelFit primary = fit_linear_model(columns(extra), lv, seed, resamples);
    const LinearModelFit pure = fit_linear_model(columns(0), lv, seed, resamples);
    double alt = pure.coefficients[1];
    if (extra == 1 && d.size() >= 5) alt = fit_linear_model(columns(2), lv, seed, 0).coefficients[1];

    out.exponent = primary.coefficients[1];
    out.log_prefactor = primary.coefficients[0];
    out.bootstrap_lo = primary.ci_lo[1];
    out.bootstrap_hi = primary.ci_hi[1];
    out.truncation_band = extra == 1 ? std::abs(out.exponent - alt) : 0.0;
    out.ci_lo = out.bootstrap_lo - out.truncation_band;
    out.ci_hi = out.bootstrap_hi + out.truncation_band;
    out.pure_exponent = pure.coefficients[1];
    out.pure_ci_lo = pure.ci_lo[1];
    out.pure_ci_hi = pure.ci_hi[1];
    out.resamples = resamples;
    return out;
}

} // namespace jumpdiff
