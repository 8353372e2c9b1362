#pragma once

// Unit-variance Gaussian examples discretized into finite complex objects,
// and the estimate-based heuristic learning rules defined on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cor/decision.hpp"
#include "cor/error.hpp"
#include "cor/learning.hpp"

namespace cor {

/// Standard normal CDF.
inline double gaussian_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Uniform grid of cells [lower + k·step, lower + (k+1)·step) on [lower, upper].
class Grid1D {
public:
    Grid1D(double lower, double upper, double step) : lower_(lower), upper_(upper), step_(step) {
        detail::require(std::isfinite(lower) && std::isfinite(upper) && std::isfinite(step),
                        "grid bounds must be finite");
        detail::require(step > 0.0, "grid step must be positive");
        const double ratio = (upper - lower) / step;
        cells_ = static_cast<std::size_t>(std::llround(ratio));
        detail::require(cells_ > 0 && std::abs(ratio - static_cast<double>(cells_)) <= 1e-6 * std::max(1.0, ratio),
                        "grid range must be a positive integer multiple of the step");
    }

    double lower() const { return lower_; }
    double upper() const { return upper_; }
    double step() const { return step_; }
    std::size_t cell_count() const { return cells_; }
    double edge(std::size_t k) const { return k == cells_ ? upper_ : lower_ + static_cast<double>(k) * step_; }
    double center(std::size_t k) const { return lower_ + (static_cast<double>(k) + 0.5) * step_; }

    /// N(mean, 1) mass of every cell, tails folded into the two boundary cells.
    std::vector<double> cell_masses(double mean) const {
        std::vector<double> out(cells_);
        double previous = 0.0;
        for (std::size_t k = 0; k < cells_; ++k) {
            double next = k + 1 == cells_ ? 1.0 : gaussian_cdf(edge(k + 1) - mean);
            out[k] = next - previous;
            previous = next;
        }
        return out;
    }

private:
    double lower_;
    double upper_;
    double step_;
    std::size_t cells_ = 0;
};

enum class GaussianVariant {
    robbins,       ///< μ = (+1, −1), priors (θ, 1−θ)
    two_mean,      ///< μ = (0, θ), priors (½, ½)
    two_model_2d,  ///< A ~ N((0,0)), B ~ N((0,1)) under θ=1 and N((1,0)) under θ=2
};

inline std::string to_string(GaussianVariant variant) {
    switch (variant) {
        case GaussianVariant::robbins: return "robbins";
        case GaussianVariant::two_mean: return "two-mean";
        case GaussianVariant::two_model_2d: return "two-model-2d";
    }
    return "unknown";
}

inline GaussianVariant parse_variant(const std::string& name) {
    if (name == "robbins") return GaussianVariant::robbins;
    if (name == "two-mean") return GaussianVariant::two_mean;
    if (name == "two-model-2d") return GaussianVariant::two_model_2d;
    throw ConfigurationError("unknown Gaussian variant '" + name + "'");
}

namespace detail {

inline double round_grid_value(double v) { return std::round(v * 1e9) / 1e9; }

inline std::vector<double> theta_range(double lower, double upper, double step) {
    require(step > 0.0 && upper >= lower, "invalid Θ range");
    const auto count = static_cast<std::size_t>(std::llround((upper - lower) / step)) + 1;
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = round_grid_value(lower + static_cast<double>(k) * step);
    return out;
}

}  // namespace detail

struct GaussianExampleSpec {
    GaussianVariant variant = GaussianVariant::robbins;
    std::vector<double> thetas;  ///< sorted ascending

    static GaussianExampleSpec robbins(double theta_step = 0.05) {
        return {GaussianVariant::robbins, detail::theta_range(0.0, 1.0, theta_step)};
    }
    static GaussianExampleSpec two_mean(double theta_step = 0.2) {
        return {GaussianVariant::two_mean, detail::theta_range(-6.0, 6.0, theta_step)};
    }
    static GaussianExampleSpec two_model_2d() { return {GaussianVariant::two_model_2d, {1.0, 2.0}}; }

    void validate() const {
        detail::require(!thetas.empty(), "Θ must be nonempty");
        detail::require(std::is_sorted(thetas.begin(), thetas.end()), "Θ must be sorted ascending");
        if (variant == GaussianVariant::robbins)
            for (double t : thetas) detail::require(t >= 0.0 && t <= 1.0, "Robbins models must lie in [0,1]");
        if (variant == GaussianVariant::two_model_2d)
            detail::require(thetas == std::vector<double>{1.0, 2.0}, "the 2D example has models {1, 2}");
    }
};

/// Mixture component of one state under one model (per-axis means for 2D).
struct Component {
    double prior;
    double mean_first;
    double mean_second;
};

inline std::vector<Component> components(GaussianVariant variant, double theta) {
    switch (variant) {
        case GaussianVariant::robbins: return {{theta, 1.0, 0.0}, {1.0 - theta, -1.0, 0.0}};
        case GaussianVariant::two_mean: return {{0.5, 0.0, 0.0}, {0.5, theta, 0.0}};
        case GaussianVariant::two_model_2d:
            return {{0.5, 0.0, 0.0}, theta == 1.0 ? Component{0.5, 0.0, 1.0} : Component{0.5, 1.0, 0.0}};
    }
    return {};
}

/// A discretized Gaussian example: the finite object plus signal coordinates.
struct DiscretizedExample {
    GaussianExampleSpec spec;
    Grid1D grid;
    std::size_t dimension = 1;
    FiniteComplexObject object;
    std::vector<double> coordinates;  ///< coordinates[x * dimension + k]: cell center of signal x

    double signal_value(std::size_t x) const { return coordinates[x * dimension]; }
    std::size_t model_count() const { return spec.thetas.size(); }

    /// Index of θ in Θ (exact match up to grid rounding).
    std::size_t model_index(double theta) const {
        for (std::size_t t = 0; t < spec.thetas.size(); ++t)
            if (std::abs(spec.thetas[t] - theta) < 1e-9) return t;
        throw ConfigurationError("θ = " + std::to_string(theta) + " is not in Θ");
    }
};

/// Grid must cover μ ± 4σ of every component with positive prior.
inline constexpr double kCoverageSigmas = 4.0;

/**
 * Cell probability = N(μ,1) mass of the cell times the state prior; for the
 * 2D variant the grid is used on both axes and signals are cell pairs
 * x = i · cells + j.
 */
inline DiscretizedExample discretize(const GaussianExampleSpec& spec, const Grid1D& grid) {
    spec.validate();
    const std::size_t models = spec.thetas.size();
    const std::size_t dim = spec.variant == GaussianVariant::two_model_2d ? 2 : 1;

    double worst_shortfall = 0.0;
    std::optional<std::size_t> worst_model;
    for (std::size_t t = 0; t < models; ++t)
        for (const auto& c : components(spec.variant, spec.thetas[t])) {
            if (c.prior <= 0.0) continue;
            for (std::size_t k = 0; k < dim; ++k) {
                double mean = k == 0 ? c.mean_first : c.mean_second;
                double shortfall = std::max(grid.lower() - (mean - kCoverageSigmas),
                                            (mean + kCoverageSigmas) - grid.upper());
                if (shortfall > worst_shortfall + 1e-12) {
                    worst_shortfall = shortfall;
                    worst_model = t;
                }
            }
        }
    if (worst_model) {
        std::ostringstream msg;
        msg << "grid [" << grid.lower() << ", " << grid.upper() << "] does not cover mean ± 4σ; worst model θ = "
            << spec.thetas[*worst_model] << " (short by " << worst_shortfall << ")";
        throw CoverageError(msg.str());
    }

    const std::size_t cells = grid.cell_count();
    const std::size_t signals = dim == 1 ? cells : cells * cells;
    std::vector<std::vector<double>> tables(models, std::vector<double>(signals * 2, 0.0));
    for (std::size_t t = 0; t < models; ++t) {
        const auto comps = components(spec.variant, spec.thetas[t]);
        for (std::size_t y = 0; y < 2; ++y) {
            const auto& c = comps[y];
            if (c.prior <= 0.0) continue;
            const auto first = grid.cell_masses(c.mean_first);
            if (dim == 1) {
                for (std::size_t x = 0; x < cells; ++x) tables[t][x * 2 + y] = c.prior * first[x];
            } else {
                const auto second = grid.cell_masses(c.mean_second);
                for (std::size_t i = 0; i < cells; ++i)
                    for (std::size_t j = 0; j < cells; ++j) tables[t][(i * cells + j) * 2 + y] = c.prior * first[i] * second[j];
            }
        }
    }

    AxisLabels labels;
    labels.states = spec.variant == GaussianVariant::two_model_2d ? std::vector<std::string>{"A", "B"}
                                                                  : std::vector<std::string>{"1", "2"};
    for (double theta : spec.thetas) {
        std::ostringstream s;
        s << theta;
        labels.models.push_back(s.str());
    }

    std::vector<double> coordinates(signals * dim);
    if (dim == 1) {
        for (std::size_t x = 0; x < cells; ++x) coordinates[x] = grid.center(x);
    } else {
        for (std::size_t i = 0; i < cells; ++i)
            for (std::size_t j = 0; j < cells; ++j) {
                coordinates[(i * cells + j) * 2] = grid.center(i);
                coordinates[(i * cells + j) * 2 + 1] = grid.center(j);
            }
    }
    return {spec, grid, dim,
            FiniteComplexObject::from_model_tables(signals, 2, tables, std::move(labels)),
            std::move(coordinates)};
}

/// Signal coordinate → cell; the two end cells absorb the tails.
struct SignalQuantizer {
    Quantizer map;
    std::vector<double> centers;  ///< representative signal of each cell
};

inline SignalQuantizer make_quantizer(const DiscretizedExample& example, double lower, double upper,
                                      std::size_t cells) {
    detail::require(example.dimension == 1, "quantizers are defined for one-dimensional examples");
    detail::require(cells > 0 && upper > lower, "invalid quantizer range");
    const double width = (upper - lower) / static_cast<double>(cells);
    SignalQuantizer q;
    q.map.cell_count = cells;
    q.map.cell_of.resize(example.object.signal_count());
    for (std::size_t x = 0; x < q.map.cell_of.size(); ++x) {
        double pos = std::floor((example.signal_value(x) - lower) / width);
        q.map.cell_of[x] = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(cells - 1)));
    }
    for (std::size_t k = 0; k < cells; ++k) q.centers.push_back(lower + (static_cast<double>(k) + 0.5) * width);
    return q;
}

inline SignalQuantizer single_cell_quantizer(const DiscretizedExample& example, double center = 0.0) {
    return {Quantizer::single_cell(example.object.signal_count()), {center}};
}

inline constexpr double kThresholdClamp = 50.0;

/// α = ½ ln[(n − Σx)/(n + Σx)], clamped to ±50 where the logarithm degenerates.
inline double robbins_threshold(const std::vector<double>& sample) {
    detail::require(!sample.empty(), "the Robbins heuristic needs a nonempty sample");
    const double n = static_cast<double>(sample.size());
    double sum = 0.0;
    for (double x : sample) sum += x;
    if (sum >= n) return -kThresholdClamp;
    if (sum <= -n) return kThresholdClamp;
    double alpha = 0.5 * std::log((n - sum) / (n + sum));
    if (!std::isfinite(alpha)) return alpha > 0 ? kThresholdClamp : -kThresholdClamp;
    return std::clamp(alpha, -kThresholdClamp, kThresholdClamp);
}

/// Decide state 1 (index 0) iff the signal is at least α.
inline Strategy threshold_strategy(const DiscretizedExample& example, double alpha) {
    detail::require(example.dimension == 1, "threshold strategies are one-dimensional");
    Decisions decisions(example.object.signal_count());
    for (std::size_t x = 0; x < decisions.size(); ++x) decisions[x] = example.signal_value(x) >= alpha ? 0 : 1;
    return Strategy::deterministic(decisions, 2);
}

struct RobbinsRule {
    double alpha;
    Strategy strategy;
};

inline RobbinsRule robbins_heuristic_strategy(const DiscretizedExample& example, const std::vector<double>& sample) {
    double alpha = robbins_threshold(sample);
    return {alpha, threshold_strategy(example, alpha)};
}

/// Closed-form consistent estimates of θ from a real sample.
enum class Estimator {
    robbins_mixture,   ///< (1/2n) Σx + ½
    two_mean_mixture,  ///< (2/n) Σx
    state_mean,        ///< (1/n) Σx, signals drawn from the state whose mean is θ
};

inline double consistent_estimate(Estimator estimator, const std::vector<double>& sample) {
    detail::require(!sample.empty(), "a consistent estimate needs a nonempty sample");
    const double n = static_cast<double>(sample.size());
    double sum = 0.0;
    for (double x : sample) sum += x;
    switch (estimator) {
        case Estimator::robbins_mixture: return sum / (2.0 * n) + 0.5;
        case Estimator::two_mean_mixture: return 2.0 * sum / n;
        case Estimator::state_mean: return sum / n;
    }
    return 0.0;
}

/// Clamp into the Θ range and snap to the nearest model; equidistant → lower θ.
inline std::size_t snap_to_models(const std::vector<double>& thetas, double estimate) {
    detail::require(!thetas.empty(), "Θ is empty");
    double clamped = std::clamp(estimate, thetas.front(), thetas.back());
    std::size_t best = 0;
    double best_distance = std::abs(thetas[0] - clamped);
    for (std::size_t t = 1; t < thetas.size(); ++t) {
        double d = std::abs(thetas[t] - clamped);
        if (d < best_distance - 1e-9) {
            best = t;
            best_distance = d;
        }
    }
    return best;
}

inline Estimator default_estimator(GaussianVariant variant) {
    detail::require(variant != GaussianVariant::two_model_2d, "no consistent estimate for the 2D example");
    return variant == GaussianVariant::robbins ? Estimator::robbins_mixture : Estimator::two_mean_mixture;
}

struct EstimateRule {
    double estimate;
    std::size_t model;
    Strategy strategy;
};

/// g^H: the optimal strategy of the snapped consistent estimate.
inline EstimateRule consistent_estimate_strategy(const DiscretizedExample& example, const LossMatrix& loss,
                                                 Estimator estimator, const std::vector<double>& sample) {
    double estimate = consistent_estimate(estimator, sample);
    std::size_t model = snap_to_models(example.spec.thetas, estimate);
    return {estimate, model, optimal_strategy(example.object, loss, ModelIndex{model})};
}

inline EstimateRule consistent_estimate_strategy(const DiscretizedExample& example, const LossMatrix& loss,
                                                 const std::vector<double>& sample) {
    return consistent_estimate_strategy(example, loss, default_estimator(example.spec.variant), sample);
}

enum class HeuristicKind { ml_supervised, ml_unsupervised, robbins, consistent };

inline std::string to_string(HeuristicKind kind) {
    switch (kind) {
        case HeuristicKind::ml_supervised: return "ml-supervised";
        case HeuristicKind::ml_unsupervised: return "ml-unsupervised";
        case HeuristicKind::robbins: return "robbins";
        case HeuristicKind::consistent: return "consistent";
    }
    return "unknown";
}

struct HeuristicSetup {
    HeuristicKind kind = HeuristicKind::ml_supervised;
    /// Representative signals of quantized cells (signal sources).
    std::vector<double> cell_centers;
    /// Estimator for the consistent kind on signal sources.
    std::optional<Estimator> estimator;
};

/// What a heuristic decides for one learning outcome.
struct HeuristicRule {
    enum class Kind { model, threshold } kind = Kind::model;
    std::size_t model = 0;  ///< plug-in model (Kind::model)
    double alpha = 0.0;     ///< decision threshold (Kind::threshold)
};

/**
 * Applies a heuristic to every outcome of the source. ML kinds use
 * argmax_θ p(z;θ); the Robbins and consistent kinds use the cell-center
 * signals of quantized outcomes (or the state-1 frequency for state-count
 * sources). Outcomes impossible under every model get model 0.
 */
inline std::vector<HeuristicRule> heuristic_rules(const DiscretizedExample& example, const LearningSource& source,
                                                  const HeuristicSetup& setup) {
    if (source.kind() == SourceKind::none)
        throw ConfigurationError(to_string(setup.kind) +
                                 ": any model estimate is meaningless when empirical data are absent (n = 0)");
    detail::require(source.has_tokens(), "heuristic procedures need a source with outcome tokens");
    detail::require(source.model_count() == example.model_count(), "source does not match the example");
    switch (setup.kind) {
        case HeuristicKind::ml_supervised:
            detail::require(source.kind() == SourceKind::pairs || source.kind() == SourceKind::states,
                            "ml-supervised needs a labeled source");
            break;
        case HeuristicKind::ml_unsupervised:
            detail::require(source.kind() == SourceKind::signals, "ml-unsupervised needs a signal source");
            break;
        case HeuristicKind::robbins:
            detail::require(example.spec.variant == GaussianVariant::robbins,
                            "the Robbins heuristic is defined for the Robbins model");
            detail::require(source.kind() == SourceKind::signals, "the Robbins heuristic needs a signal source");
            break;
        case HeuristicKind::consistent:
            if (source.kind() == SourceKind::states)
                detail::require(example.spec.variant == GaussianVariant::robbins,
                                "state-frequency estimates need the Robbins model");
            else
                detail::require(source.kind() == SourceKind::signals, "consistent estimates need a signal source");
            break;
    }

    auto sample_signals = [&](std::size_t z) {
        std::vector<double> values;
        for (std::size_t cell : source.tokens(z)) values.push_back(setup.cell_centers.at(cell));
        return values;
    };

    std::vector<HeuristicRule> rules(source.outcome_count());
    for (std::size_t z = 0; z < rules.size(); ++z) {
        bool possible = false;
        for (std::size_t t = 0; t < source.model_count(); ++t) possible = possible || source.prob(z, t) > 0.0;
        if (!possible) continue;
        auto& rule = rules[z];
        switch (setup.kind) {
            case HeuristicKind::ml_supervised:
            case HeuristicKind::ml_unsupervised: rule.model = ml_estimate_from_outcome(source, z).value; break;
            case HeuristicKind::robbins:
                rule.kind = HeuristicRule::Kind::threshold;
                rule.alpha = robbins_threshold(sample_signals(z));
                break;
            case HeuristicKind::consistent:
                if (source.kind() == SourceKind::states) {
                    const auto& tokens = source.tokens(z);
                    double first = static_cast<double>(std::count(tokens.begin(), tokens.end(), std::size_t{0}));
                    rule.model = snap_to_models(example.spec.thetas, first / static_cast<double>(tokens.size()));
                } else {
                    Estimator est = setup.estimator.value_or(default_estimator(example.spec.variant));
                    rule.model = snap_to_models(example.spec.thetas, consistent_estimate(est, sample_signals(z)));
                }
                break;
        }
    }
    return rules;
}

/// The explicit procedure g(z) built from the heuristic rules.
inline LearningProcedure heuristic_procedure(const DiscretizedExample& example, const LossMatrix& loss,
                                             const LearningSource& source, const HeuristicSetup& setup) {
    const auto rules = heuristic_rules(example, source, setup);
    const ExpectedLoss table(example.object, loss);
    std::vector<Strategy> strategies;
    strategies.reserve(rules.size());
    for (const auto& rule : rules)
        strategies.push_back(rule.kind == HeuristicRule::Kind::threshold
                                 ? threshold_strategy(example, rule.alpha)
                                 : Strategy::deterministic(table.optimal_decisions(rule.model),
                                                           example.object.state_count()));
    return LearningProcedure::explicit_table(std::move(strategies));
}

/// R_Z of the heuristic procedure at every model, from cached per-rule risk rows.
inline std::vector<double> heuristic_procedure_risks(const DiscretizedExample& example, const LossMatrix& loss,
                                                     const LearningSource& source, const HeuristicSetup& setup) {
    const auto rules = heuristic_rules(example, source, setup);
    const ExpectedLoss table(example.object, loss);
    const std::size_t models = example.model_count();
    std::vector<std::vector<double>> model_rows(models);
    std::vector<std::pair<double, std::vector<double>>> threshold_rows;
    auto row_for = [&](const HeuristicRule& rule) -> const std::vector<double>& {
        if (rule.kind == HeuristicRule::Kind::model) {
            auto& row = model_rows[rule.model];
            if (row.empty()) {
                const auto decisions = table.optimal_decisions(rule.model);
                for (std::size_t t = 0; t < models; ++t) row.push_back(table.risk(decisions, t));
            }
            return row;
        }
        for (const auto& [alpha, row] : threshold_rows)
            if (alpha == rule.alpha) return row;
        const auto decisions = threshold_strategy(example, rule.alpha).decisions();
        std::vector<double> row;
        for (std::size_t t = 0; t < models; ++t) row.push_back(table.risk(decisions, t));
        threshold_rows.emplace_back(rule.alpha, std::move(row));
        return threshold_rows.back().second;
    };
    std::vector<double> out(models, 0.0);
    for (std::size_t z = 0; z < rules.size(); ++z) {
        const auto& row = row_for(rules[z]);
        for (std::size_t t = 0; t < models; ++t) out[t] += source.prob(z, t) * row[t];
    }
    return out;
}

inline double heuristic_procedure_risk(const DiscretizedExample& example, const LossMatrix& loss,
                                       const LearningSource& source, const HeuristicSetup& setup, ModelIndex model) {
    detail::check_model(example.object, model);
    return heuristic_procedure_risks(example, loss, source, setup)[model.value];
}

}  // namespace cor
