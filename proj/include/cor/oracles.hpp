#pragma once

// Brute-force references: exhaustive strategy enumeration, sort-based simplex
// projection, grid-searched duals. These share no code path with the
// optimized routines they check; every risk here is the plain triple sum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "cor/decision.hpp"
#include "cor/error.hpp"
#include "cor/learning.hpp"

namespace cor::oracles {

inline constexpr double kEnumerationBound = 1e6;

/// A small instance: |X|, |Y|, |Θ| ≤ 4 and |Z| ≤ 8.
class TinyInstance {
public:
    TinyInstance(FiniteComplexObject object, LossMatrix loss, std::optional<LearningSource> source = std::nullopt)
        : object_(std::move(object)),
          loss_(std::move(loss)),
          source_(source ? std::move(*source) : LearningSource::none(object_.model_count())) {
        cor::detail::require(object_.signal_count() <= 4 && object_.state_count() <= 4 && object_.model_count() <= 4,
                        "tiny instances are limited to |X|, |Y|, |Θ| <= 4");
        cor::detail::require(loss_.state_count() == object_.state_count(), "loss does not match the object");
        cor::detail::require(source_.outcome_count() <= 8, "tiny instances are limited to |Z| <= 8");
        cor::detail::require(source_.model_count() == object_.model_count(), "source does not match the object");
    }

    const FiniteComplexObject& object() const { return object_; }
    const LossMatrix& loss() const { return loss_; }
    const LearningSource& source() const { return source_; }

private:
    FiniteComplexObject object_;
    LossMatrix loss_;
    LearningSource source_;
};

/// Σ_x Σ_y' Σ_y q(y'|x) p(x,y;θ) w(y,y'), written out independently.
inline double brute_risk(const FiniteComplexObject& object, const LossMatrix& loss, const Strategy& q,
                         std::size_t model) {
    double total = 0.0;
    for (std::size_t x = 0; x < object.signal_count(); ++x)
        for (std::size_t d = 0; d < object.state_count(); ++d)
            for (std::size_t y = 0; y < object.state_count(); ++y)
                total += q(x, d) * object.prob(x, y, model) * loss(y, d);
    return total;
}

/// Exact projection onto the simplex by sorted thresholding.
inline WeightFunction sort_projection(std::span<const double> v) {
    cor::detail::require(!v.empty(), "cannot project an empty vector");
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double threshold = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0.0) threshold = candidate;
    }
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - threshold, 0.0);
    double sum = std::accumulate(out.begin(), out.end(), 0.0);
    for (double& x : out) x /= sum;
    return WeightFunction(std::move(out));
}

inline WeightFunction sort_projection(const std::vector<double>& v) { return sort_projection(std::span<const double>(v)); }

inline double deterministic_strategy_count(const FiniteComplexObject& object) {
    return std::pow(static_cast<double>(object.state_count()), static_cast<double>(object.signal_count()));
}

/// Calls `visit` with every deterministic strategy, decisions in odometer order (last signal fastest).
template <typename Visit>
void for_each_deterministic_strategy(const FiniteComplexObject& object, Visit visit) {
    if (deterministic_strategy_count(object) > kEnumerationBound)
        throw BudgetError("|Y|^|X| exceeds the enumeration bound of 1e6 strategies");
    const std::size_t signals = object.signal_count();
    const std::size_t states = object.state_count();
    Decisions decisions(signals, 0);
    while (true) {
        visit(Strategy::deterministic(decisions, states));
        std::size_t pos = signals;
        while (pos > 0 && decisions[pos - 1] + 1 == states) --pos;
        if (pos == 0) return;
        ++decisions[pos - 1];
        std::fill(decisions.begin() + static_cast<std::ptrdiff_t>(pos), decisions.end(), 0);
    }
}

inline std::vector<Strategy> enumerate_deterministic_strategies(const FiniteComplexObject& object) {
    std::vector<Strategy> out;
    for_each_deterministic_strategy(object, [&](Strategy s) { out.push_back(std::move(s)); });
    return out;
}

inline std::vector<Strategy> enumerate_deterministic_strategies(const TinyInstance& instance) {
    return enumerate_deterministic_strategies(instance.object());
}

/// Minimum of Σ_θ weights(θ) R(q,θ) over all deterministic strategies.
inline double brute_force_weighted_minimum(const FiniteComplexObject& object, const LossMatrix& loss,
                                           std::span<const double> weights) {
    double best = std::numeric_limits<double>::infinity();
    for_each_deterministic_strategy(object, [&](const Strategy& q) {
        double value = 0.0;
        for (std::size_t t = 0; t < object.model_count(); ++t) value += weights[t] * brute_risk(object, loss, q, t);
        best = std::min(best, value);
    });
    return best;
}

inline double brute_force_optimal_risk(const FiniteComplexObject& object, const LossMatrix& loss, std::size_t model) {
    std::vector<double> weights(object.model_count(), 0.0);
    weights[model] = 1.0;
    return brute_force_weighted_minimum(object, loss, weights);
}

/// First enumerated strategy with the minimal risk under `model`.
inline Strategy brute_force_optimal(const FiniteComplexObject& object, const LossMatrix& loss, std::size_t model) {
    std::optional<Strategy> best;
    double best_risk = std::numeric_limits<double>::infinity();
    for_each_deterministic_strategy(object, [&](Strategy q) {
        double r = brute_risk(object, loss, q, model);
        if (r < best_risk) {
            best_risk = r;
            best = std::move(q);
        }
    });
    return *best;
}

namespace detail {

inline bool strictly_better_everywhere(const FiniteComplexObject& object, const LossMatrix& loss,
                                       const Strategy& candidate, const std::vector<double>& target_risks) {
    for (std::size_t t = 0; t < object.model_count(); ++t)
        if (!(brute_risk(object, loss, candidate, t) < target_risks[t])) return false;
    return true;
}

inline std::vector<double> risks_of(const FiniteComplexObject& object, const LossMatrix& loss, const Strategy& q) {
    std::vector<double> out(object.model_count());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = brute_risk(object, loss, q, t);
    return out;
}

/// Every point of the simplex grid with `points` values per axis (|Θ| ≤ 3).
inline std::vector<std::vector<double>> simplex_grid(std::size_t models, std::size_t points) {
    cor::detail::require(models >= 1 && models <= 3, "simplex grids are limited to |Θ| <= 3");
    cor::detail::require(points >= 2, "a simplex grid needs at least two points per axis");
    const double step = 1.0 / static_cast<double>(points - 1);
    std::vector<std::vector<double>> out;
    if (models == 1) return {{1.0}};
    for (std::size_t i = 0; i < points; ++i) {
        if (models == 2) {
            double a = static_cast<double>(i) * step;
            out.push_back({a, 1.0 - a});
            continue;
        }
        for (std::size_t j = 0; i + j < points; ++j) {
            double a = static_cast<double>(i) * step;
            double b = static_cast<double>(j) * step;
            out.push_back({a, b, std::max(0.0, 1.0 - a - b)});
        }
    }
    return out;
}

}  // namespace detail

/// A deterministic strategy strictly better than `target` under every model, if one exists.
inline std::optional<Strategy> domination_search(const FiniteComplexObject& object, const LossMatrix& loss,
                                                 const Strategy& target) {
    const auto target_risks = detail::risks_of(object, loss, target);
    std::optional<Strategy> found;
    for_each_deterministic_strategy(object, [&](Strategy q) {
        if (!found && detail::strictly_better_everywhere(object, loss, q, target_risks)) found = std::move(q);
    });
    return found;
}

inline std::optional<Strategy> domination_search(const TinyInstance& instance, const Strategy& target) {
    return domination_search(instance.object(), instance.loss(), target);
}

/**
 * For objects too large to enumerate: sweeps Bayesian strategies over a
 * simplex grid of weights (|Θ| ≤ 3) and returns the first one predominating
 * `target`. Bayesian strategies are computed here by a direct per-signal
 * argmin, not through the library's batched tables.
 */
inline std::optional<Strategy> bayesian_domination_search(const FiniteComplexObject& object, const LossMatrix& loss,
                                                          const Strategy& target, std::size_t grid_points) {
    const auto target_risks = detail::risks_of(object, loss, target);
    for (const auto& tau : detail::simplex_grid(object.model_count(), grid_points)) {
        Decisions decisions(object.signal_count());
        for (std::size_t x = 0; x < object.signal_count(); ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t d = 0; d < object.state_count(); ++d) {
                double cost = 0.0;
                for (std::size_t y = 0; y < object.state_count(); ++y)
                    for (std::size_t t = 0; t < object.model_count(); ++t)
                        cost += tau[t] * object.prob(x, y, t) * loss(y, d);
                if (cost < best) {
                    best = cost;
                    decisions[x] = d;
                }
            }
        }
        Strategy candidate = Strategy::deterministic(decisions, object.state_count());
        if (detail::strictly_better_everywhere(object, loss, candidate, target_risks)) return candidate;
    }
    return std::nullopt;
}

/**
 * Φ(τ) by enumeration: the minimal τ-weighted learning risk decomposes per
 * outcome z into a minimum over deterministic strategies under weights
 * τ(θ)p(z;θ); the offset is Σ τ(θ) min_q R(q,θ), also by enumeration.
 */
inline double brute_force_phi(const FiniteComplexObject& object, const LossMatrix& loss, const LearningSource& source,
                              std::span<const double> tau) {
    const std::size_t models = object.model_count();
    const auto strategies = enumerate_deterministic_strategies(object);
    std::vector<std::vector<double>> risks(strategies.size(), std::vector<double>(models));
    for (std::size_t s = 0; s < strategies.size(); ++s)
        for (std::size_t t = 0; t < models; ++t) risks[s][t] = brute_risk(object, loss, strategies[s], t);

    double learning = 0.0;
    for (std::size_t z = 0; z < source.outcome_count(); ++z) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : risks) {
            double value = 0.0;
            for (std::size_t t = 0; t < models; ++t) value += tau[t] * source.prob(z, t) * r[t];
            best = std::min(best, value);
        }
        learning += best;
    }
    double offset = 0.0;
    for (std::size_t t = 0; t < models; ++t) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& r : risks) best = std::min(best, r[t]);
        offset += tau[t] * best;
    }
    return learning - offset;
}

/// max of Φ over a uniform simplex grid with `grid_points` values per axis.
inline double grid_dual_value(const TinyInstance& instance, std::size_t grid_points) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& tau : detail::simplex_grid(instance.object().model_count(), grid_points))
        best = std::max(best, brute_force_phi(instance.object(), instance.loss(), instance.source(), tau));
    return best;
}

/// Exhaustive log-likelihood table Σ_i log p(x_i,y_i;θ) for every θ.
inline std::vector<double> exhaustive_log_likelihoods(const FiniteComplexObject& object,
                                                      const std::vector<LabeledSignal>& sample) {
    std::vector<double> out(object.model_count(), 0.0);
    for (std::size_t t = 0; t < out.size(); ++t)
        for (const auto& [x, y] : sample) {
            double p = object.prob(x, y, t);
            out[t] += p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
        }
    return out;
}

}  // namespace cor::oracles
