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

#include "jumpdiff/problem.hpp"

#include "jumpdiff/error.hpp"
#include "jumpdiff/theory.hpp"

#include "json.hpp"

#include <cmath>
#include <numbers>

namespace jumpdiff {

using nlohmann::json;

namespace {

ScalarField cst(double c) { return ScalarField::constant(c); }

/// sum_i c[i] x^i
ScalarField poly_x(std::initializer_list<double> c) {
    std::vector<Monomial> terms;
    int p = 0;
    for (double ci : c) {
        if (ci != 0.0) terms.push_back({ci, p, 0});
        ++p;
    }
    return ScalarField::polynomial(terms);
}

Point interior_point(const Domain& d, double frac) {
    switch (d.kind()) {
    case DomainKind::Interval:
        return {d.lower().x + frac * (d.upper().x - d.lower().x), 0.0};
    case DomainKind::Rectangle:
        return {d.lower().x + frac * (d.upper().x - d.lower().x), 0.5 * (d.lower().y + d.upper().y)};
    case DomainKind::Disk:
        return d.center() + Point{(frac - 0.5) * d.outer_radius(), 0.0};
    case DomainKind::Annulus:
        return d.center() +
               Point{d.inner_radius() + (0.25 + 0.5 * frac) * (d.outer_radius() - d.inner_radius()), 0.0};
    }
    return {};
}

ProblemSpec interval_problem(std::string name, ScalarField a, ScalarField V, ScalarField mu, ScalarField f, int k) {
    const Domain d = Domain::interval(0.0, 1.0);
    return make_problem(std::move(name), d,
                        CoefficientSet(d, MatrixField::isotropic(1, std::move(a)), std::move(V), std::move(mu),
                                       std::move(f), k));
}

ProblemSpec uniform_2d(std::string name, const Domain& d) {
    return make_problem(std::move(name), d,
                        CoefficientSet(d, MatrixField::isotropic(2, cst(1)), cst(1), cst(1.0 / d.measure()),
                                       poly_x({0, 1}), 0));
}

// ---------------------------------------------------------------------------
// JSON helpers

double number(const json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string("expected a number for ") + what);
    return j.get<double>();
}

Point point(const json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.empty() || j.size() > 2) throw ConfigError(std::string("expected [x, y] for ") + what);
    return {number(j[0], what), j.size() > 1 ? number(j[1], what) : 0.0};
}

const json& member(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing key \"") + key + "\"");
    return j.at(key);
}

ScalarField field_from(const json& j, const Domain& domain) {
    if (j.is_number()) return cst(j.get<double>());
    if (!j.is_object() || j.empty()) throw ConfigError("a field is a number or an object");
    if (j.contains("poly")) {
        std::vector<Monomial> terms;
        for (const json& t : member(j, "poly")) {
            if (!t.is_array() || t.size() < 2 || t.size() > 3) throw ConfigError("poly terms are [c, px, py]");
            const int px = t[1].get<int>(), py = t.size() > 2 ? t[2].get<int>() : 0;
            if (px < 0 || py < 0) throw ConfigError("negative polynomial power");
            terms.push_back({number(t[0], "poly coefficient"), px, py});
        }
        return ScalarField::polynomial(terms);
    }
    for (const char* kind : {"sin", "cos"}) {
        if (j.contains(kind)) {
            const double phase = j.contains("phase") ? number(j["phase"], "phase") : 0.0;
            const double amp = j.contains("amplitude") ? number(j["amplitude"], "amplitude") : 1.0;
            return ScalarField::trig(kind[0] == 's' ? TrigKind::Sin : TrigKind::Cos, point(j[kind], kind), phase,
                                     amp);
        }
    }
    if (j.contains("exp")) {
        const double amp = j.contains("amplitude") ? number(j["amplitude"], "amplitude") : 1.0;
        return ScalarField::exponential(point(j["exp"], "exp"), amp);
    }
    if (j.contains("dist")) return ScalarField::distance_power(domain, j["dist"].get<int>());
    if (j.contains("sum") || j.contains("product")) {
        const bool sum = j.contains("sum");
        const json& parts = sum ? j["sum"] : j["product"];
        if (!parts.is_array() || parts.empty()) throw ConfigError("sum/product needs a non-empty list");
        ScalarField out = field_from(parts[0], domain);
        for (std::size_t i = 1; i < parts.size(); ++i)
            out = sum ? out + field_from(parts[i], domain) : out * field_from(parts[i], domain);
        return out;
    }
    if (j.contains("scale")) return number(j["scale"], "scale") * field_from(member(j, "field"), domain);
    throw ConfigError("unknown field type: " + j.dump());
}

Domain domain_from(const json& j) {
    const std::string type = member(j, "type").get<std::string>();
    if (type == "interval") return Domain::interval(number(member(j, "lo"), "lo"), number(member(j, "hi"), "hi"));
    if (type == "rectangle") return Domain::rectangle(point(member(j, "lower"), "lower"), point(member(j, "upper"), "upper"));
    if (type == "disk") return Domain::disk(point(member(j, "center"), "center"), number(member(j, "radius"), "radius"));
    if (type == "annulus")
        return Domain::annulus(point(member(j, "center"), "center"), number(member(j, "inner"), "inner"),
                               number(member(j, "outer"), "outer"));
    throw ConfigError("unknown domain type: " + type);
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
}

} // namespace

ProblemSpec make_problem(std::string name, const Domain& domain, const CoefficientSet& coeffs, bool theory_applies) {
    if (coeffs.dimension() != domain.dimension()) throw ConfigError("coefficient and domain dimensions differ");
    if (theory_applies) {
        const VanishingReport r =
            validate_vanishing_order(coeffs, coeffs.k(), default_boundary_quadrature(domain));
        if (!r.pass) throw CoefficientError("declared vanishing order k = " + std::to_string(coeffs.k()) +
                                            " does not hold: " + r.message);
    }
    return ProblemSpec{std::move(name), domain, coeffs, interior_point(domain, 0.5), interior_point(domain, 0.25),
                       theory_applies};
}

std::vector<std::string> preset_names() {
    return {"interval-k0-uniform", "interval-k0-asym", "interval-k1-beta22", "interval-k2-quartic",
            "interval-flux-a2v3",  "square-k0-uniform", "disk-k0-radial",   "annulus-flux",
            "probe-Vm1",           "probe-Vm2",         "probe-Vm3"};
}

ProblemSpec preset(const std::string& name) {
    // f(x) = x is the indicator of the right end on (0, 1).
    if (name == "interval-k0-uniform") return interval_problem(name, cst(1), cst(1), cst(1), poly_x({0, 1}), 0);
    // Endpoint weights mu / sqrt(V) = {1/2, 3/4}: phi_0 = 0.6 for f(x) = x.
    if (name == "interval-k0-asym")
        return interval_problem(name, cst(1), poly_x({1, 3}), poly_x({0.5, 1}), poly_x({0, 1}), 0);
    if (name == "interval-k1-beta22") return interval_problem(name, cst(1), cst(1), poly_x({0, 6, -6}), poly_x({0, 1}), 1);
    if (name == "interval-k2-quartic")
        return interval_problem(name, cst(1), cst(1), poly_x({0, 0, 30, -60, 30}), poly_x({0, 1}), 2);
    if (name == "interval-flux-a2v3") return interval_problem(name, cst(2), cst(3), cst(1), poly_x({0, 1}), 0);
    if (name == "square-k0-uniform") return uniform_2d(name, Domain::rectangle({0, 0}, {1, 1}));
    if (name == "disk-k0-radial") return uniform_2d(name, Domain::disk({0, 0}, 1));
    if (name == "annulus-flux") return uniform_2d(name, Domain::annulus({0, 0}, 0.5, 1));
    if (name == "probe-Vm1") return vanishing_V_problem(1);
    if (name == "probe-Vm2") return vanishing_V_problem(2);
    if (name == "probe-Vm3") return vanishing_V_problem(3);
    throw ConfigError("unknown preset: " + name);
}

ProblemSpec vanishing_V_problem(int m) {
    if (m < 0) throw ConfigError("vanishing order of V must be non-negative");
    const Domain d = Domain::interval(0.0, 1.0);
    CoefficientChecks checks;
    checks.require_positive_V = m == 0;
    const ScalarField V = m == 0 ? cst(1) : std::pow(2.0, m) * ScalarField::distance_power(d, m);
    return make_problem("probe-Vm" + std::to_string(m), d,
                        CoefficientSet(d, MatrixField::isotropic(1, cst(1)), V, cst(1), poly_x({0, 1}), 0, checks),
                        m == 0);
}

ScalarField parse_field(const std::string& json_text, const Domain& domain) {
    return field_from(parse_text(json_text), domain);
}

Domain parse_domain(const std::string& json_text) { return domain_from(parse_text(json_text)); }

ProblemSpec parse_problem(const std::string& json_text) {
    const json doc = parse_text(json_text);
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    try {
        const bool has_coeffs = doc.contains("coefficients");
        if (doc.contains("preset") && !has_coeffs && !doc.contains("domain") && !doc.contains("k")) {
            ProblemSpec p = preset(doc["preset"].get<std::string>());
            if (doc.contains("x0")) p.x0 = point(doc["x0"], "x0");
            if (doc.contains("x1")) p.x1 = point(doc["x1"], "x1");
            return p;
        }
        if (doc.contains("preset")) throw ConfigError("a preset cannot be combined with domain, coefficients or k");
        const Domain domain = domain_from(member(doc, "domain"));
        const json& c = member(doc, "coefficients");
        const int dim = domain.dimension();

        std::array<ScalarField, 2> drift{cst(0), cst(0)};
        if (c.contains("b")) {
            const json& b = c["b"];
            if (!b.is_array() || static_cast<int>(b.size()) != dim) throw ConfigError("b needs one field per dimension");
            for (int i = 0; i < dim; ++i) drift[static_cast<std::size_t>(i)] = field_from(b[static_cast<std::size_t>(i)], domain);
        }
        MatrixField a;
        const json& aj = member(c, "a");
        if (aj.is_object() && aj.contains("a11")) {
            if (dim != 2) throw ConfigError("a full diffusion matrix needs a 2D domain");
            a = MatrixField::general(field_from(aj["a11"], domain), field_from(member(aj, "a12"), domain),
                                     field_from(member(aj, "a22"), domain), drift);
        } else {
            a = MatrixField::isotropic(dim, field_from(aj, domain), drift);
        }
        CoefficientChecks checks;
        if (c.contains("allow_vanishing_V")) checks.require_positive_V = !c["allow_vanishing_V"].get<bool>();
        const int k = doc.contains("k") ? doc["k"].get<int>() : 0;
        if (k < 0) throw ConfigError("k must be non-negative");
        const CoefficientSet coeffs(domain, a, field_from(member(c, "V"), domain), field_from(member(c, "mu"), domain),
                                    c.contains("f") ? field_from(c["f"], domain) : cst(1), k, checks);
        ProblemSpec p = make_problem(doc.contains("name") ? doc["name"].get<std::string>() : "custom", domain, coeffs,
                                     checks.require_positive_V);
        if (doc.contains("x0")) p.x0 = point(doc["x0"], "x0");
        if (doc.contains("x1")) p.x1 = point(doc["x1"], "x1");
        if (!domain.contains(p.x0) || !domain.contains(p.x1)) throw ConfigError("x0 and x1 must lie inside the domain");
        return p;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
}

} // namespace jumpdiff
