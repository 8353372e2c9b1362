#pragma once

// JSON schemas for objects, losses, strategies, weights, sources and Gaussian
// example specs; CSV writers for solver traces and risk curves.
//
// Tensors are flattened row-major in the axis order of their field name:
// joint_prob[x][y][θ], w[y][y'], q[x][y'], prob[z][θ].

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cor/decision.hpp"
#include "cor/error.hpp"
#include "cor/gaussian.hpp"
#include "cor/learning.hpp"
#include "cor/solver.hpp"

namespace cor::io {

using json = nlohmann::json;

inline constexpr const char* kLibraryVersion = "0.1.0";

namespace detail {

inline void expect_type(const json& j, const char* type) {
    if (!j.is_object() || j.value("type", std::string{}) != type)
        throw ConfigurationError(std::string("expected a JSON document of type '") + type + "'");
}

template <typename T>
T field(const json& j, const char* name) {
    if (!j.contains(name)) throw ConfigurationError(std::string("missing JSON field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception& e) {
        throw ConfigurationError(std::string("bad JSON field '") + name + "': " + e.what());
    }
}

}  // namespace detail

inline json to_json(const FiniteComplexObject& object) {
    json j{{"type", "finite_complex_object"},
           {"signals", object.signal_count()},
           {"states", object.state_count()},
           {"models", object.model_count()},
           {"joint_prob", object.joint_row_major()}};
    const auto& labels = object.labels();
    if (!labels.signals.empty() || !labels.states.empty() || !labels.models.empty())
        j["labels"] = {{"signals", labels.signals}, {"states", labels.states}, {"models", labels.models}};
    return j;
}

inline FiniteComplexObject object_from_json(const json& j) {
    detail::expect_type(j, "finite_complex_object");
    AxisLabels labels;
    if (j.contains("labels")) {
        const auto& l = j.at("labels");
        labels.signals = l.value("signals", std::vector<std::string>{});
        labels.states = l.value("states", std::vector<std::string>{});
        labels.models = l.value("models", std::vector<std::string>{});
    }
    return {detail::field<std::size_t>(j, "signals"), detail::field<std::size_t>(j, "states"),
            detail::field<std::size_t>(j, "models"), detail::field<std::vector<double>>(j, "joint_prob"),
            std::move(labels)};
}

inline json to_json(const LossMatrix& loss) {
    return {{"type", "loss_matrix"}, {"states", loss.state_count()}, {"w", loss.values()}};
}

inline LossMatrix loss_from_json(const json& j) {
    detail::expect_type(j, "loss_matrix");
    return {detail::field<std::size_t>(j, "states"), detail::field<std::vector<double>>(j, "w")};
}

inline json to_json(const Strategy& strategy) {
    return {{"type", "strategy"},
            {"signals", strategy.signal_count()},
            {"states", strategy.state_count()},
            {"q", strategy.values()}};
}

inline Strategy strategy_from_json(const json& j) {
    detail::expect_type(j, "strategy");
    return {detail::field<std::size_t>(j, "signals"), detail::field<std::size_t>(j, "states"),
            detail::field<std::vector<double>>(j, "q")};
}

inline json to_json(const WeightFunction& weights) { return {{"type", "weight_function"}, {"tau", weights.values()}}; }

inline WeightFunction weights_from_json(const json& j) {
    detail::expect_type(j, "weight_function");
    return WeightFunction(detail::field<std::vector<double>>(j, "tau"));
}

inline std::string to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::none: return "none";
        case SourceKind::pairs: return "pairs";
        case SourceKind::states: return "states";
        case SourceKind::signals: return "signals";
    }
    return "none";
}

inline SourceKind source_kind_from_string(const std::string& name) {
    if (name == "none") return SourceKind::none;
    if (name == "pairs") return SourceKind::pairs;
    if (name == "states") return SourceKind::states;
    if (name == "signals") return SourceKind::signals;
    throw ConfigurationError("unknown source kind '" + name + "'");
}

inline json to_json(const LearningSource& source) {
    json j{{"type", "learning_source"},
           {"kind", to_string(source.kind())},
           {"outcomes", source.outcome_count()},
           {"models", source.model_count()},
           {"prob", source.values()},
           {"descriptors", source.descriptors()}};
    if (source.has_tokens()) {
        json tokens = json::array();
        for (std::size_t z = 0; z < source.outcome_count(); ++z) tokens.push_back(source.tokens(z));
        j["tokens"] = std::move(tokens);
    }
    return j;
}

inline LearningSource source_from_json(const json& j) {
    detail::expect_type(j, "learning_source");
    const auto outcomes = detail::field<std::size_t>(j, "outcomes");
    const auto models = detail::field<std::size_t>(j, "models");
    auto prob = detail::field<std::vector<double>>(j, "prob");
    if (prob.size() != outcomes * models) throw ConfigurationError("learning source 'prob' has wrong length");
    return {models, std::move(prob), j.value("descriptors", std::vector<std::string>{}),
            j.value("tokens", std::vector<std::vector<std::size_t>>{}),
            source_kind_from_string(j.value("kind", std::string("none")))};
}

/// Gaussian example spec + signal grid.
struct GaussianExampleFile {
    GaussianExampleSpec spec;
    Grid1D grid;
};

inline json to_json(const GaussianExampleFile& file) {
    return {{"type", "gaussian_example"},
            {"variant", to_string(file.spec.variant)},
            {"grid", {{"lower", file.grid.lower()}, {"upper", file.grid.upper()}, {"step", file.grid.step()}}},
            {"theta", file.spec.thetas}};
}

/// `theta` is either an explicit list or {"lower", "upper", "step"}.
inline GaussianExampleFile gaussian_example_from_json(const json& j) {
    detail::expect_type(j, "gaussian_example");
    GaussianExampleSpec spec;
    spec.variant = parse_variant(detail::field<std::string>(j, "variant"));
    const auto& theta = j.at("theta");
    if (theta.is_array()) {
        spec.thetas = theta.get<std::vector<double>>();
    } else {
        spec.thetas = cor::detail::theta_range(detail::field<double>(theta, "lower"), detail::field<double>(theta, "upper"),
                                               detail::field<double>(theta, "step"));
    }
    spec.validate();
    const auto& grid = j.at("grid");
    return {std::move(spec), Grid1D(detail::field<double>(grid, "lower"), detail::field<double>(grid, "upper"),
                                    detail::field<double>(grid, "step"))};
}

/// Fixed-precision number formatting shared by all CSV output.
inline std::string format_number(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", v);
    return buffer;
}

/// iteration,S,s,gap,max_regret[,tau_0,...]
inline void write_trace_csv(std::ostream& out, const SolverTrace& trace, bool with_weights,
                            const std::string& header_comment = {}) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "iteration,S,s,gap,max_regret";
    const std::size_t models = trace.records.empty() ? 0 : trace.records.front().delta.size();
    if (with_weights)
        for (std::size_t t = 0; t < models; ++t) out << ",tau_" << t;
    out << '\n';
    for (const auto& r : trace.records) {
        out << r.iteration << ',' << format_number(r.upper) << ',' << format_number(r.lower) << ','
            << format_number(r.upper - r.lower) << ',' << format_number(r.max_delta);
        if (with_weights)
            for (std::size_t t = 0; t < models; ++t)
                out << ',' << (t < r.weights.size() ? format_number(r.weights[t]) : std::string{});
        out << '\n';
    }
}

struct CurvePoint {
    double theta;
    double risk;
    double optimal_risk;
};

/// theta,risk,optimal_risk,regret,status
inline void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve, const std::string& status,
                            const std::string& header_comment = {}) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "theta,risk,optimal_risk,regret,status\n";
    for (const auto& p : curve)
        out << format_number(p.theta) << ',' << format_number(p.risk) << ',' << format_number(p.optimal_risk) << ','
            << format_number(p.risk - p.optimal_risk) << ',' << status << '\n';
}

}  // namespace cor::io
