#pragma once

// Finite complex objects, strategies and losses; risks, optimal and Bayesian
// strategies for arbitrary weight functions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cor/error.hpp"

namespace cor {

inline constexpr double kProbabilityTolerance = 1e-9;

/// Index of a model in Θ.
struct ModelIndex {
    std::size_t value = 0;
    constexpr explicit ModelIndex(std::size_t v) : value(v) {}
};

/// Per-signal decision (state index) of a deterministic strategy.
using Decisions = std::vector<std::size_t>;

struct AxisLabels {
    std::vector<std::string> signals;
    std::vector<std::string> states;
    std::vector<std::string> models;
};

/**
 * The quadruple <X, Y, Θ, p(x,y;θ)> with finite axes.
 *
 * Probabilities are stored model-major so that a single model's table
 * p(·,·;θ) is contiguous (index x * |Y| + y).
 */
class FiniteComplexObject {
public:
    /// `joint` is row-major p[x][y][θ].
    FiniteComplexObject(std::size_t signals, std::size_t states, std::size_t models,
                        const std::vector<double>& joint, AxisLabels labels = {})
        : signals_(signals), states_(states), models_(models), labels_(std::move(labels)) {
        check_sizes();
        detail::require(joint.size() == signals * states * models,
                        "joint probability tensor has " + std::to_string(joint.size()) +
                            " entries, expected " + std::to_string(signals * states * models));
        by_model_.resize(joint.size());
        for (std::size_t x = 0; x < signals; ++x)
            for (std::size_t y = 0; y < states; ++y)
                for (std::size_t t = 0; t < models; ++t)
                    by_model_[(t * signals + x) * states + y] = joint[(x * states + y) * models + t];
        validate();
    }

    /// `tables[θ]` holds p(x,y;θ) at index x * |Y| + y.
    static FiniteComplexObject from_model_tables(std::size_t signals, std::size_t states,
                                                 const std::vector<std::vector<double>>& tables,
                                                 AxisLabels labels = {}) {
        FiniteComplexObject object;
        object.signals_ = signals;
        object.states_ = states;
        object.models_ = tables.size();
        object.labels_ = std::move(labels);
        object.check_sizes();
        object.by_model_.reserve(signals * states * tables.size());
        for (const auto& table : tables) {
            detail::require(table.size() == signals * states,
                            "model table has wrong size " + std::to_string(table.size()));
            object.by_model_.insert(object.by_model_.end(), table.begin(), table.end());
        }
        object.validate();
        return object;
    }

    std::size_t signal_count() const { return signals_; }
    std::size_t state_count() const { return states_; }
    std::size_t model_count() const { return models_; }
    const AxisLabels& labels() const { return labels_; }

    double prob(std::size_t x, std::size_t y, std::size_t model) const {
        return by_model_[(model * signals_ + x) * states_ + y];
    }

    std::span<const double> model_table(std::size_t model) const {
        return {by_model_.data() + model * signals_ * states_, signals_ * states_};
    }

    /// Σ_y p(x,y;θ).
    double signal_marginal(std::size_t x, std::size_t model) const {
        double sum = 0.0;
        for (std::size_t y = 0; y < states_; ++y) sum += prob(x, y, model);
        return sum;
    }

    /// Row-major p[x][y][θ], the serialized layout.
    std::vector<double> joint_row_major() const {
        std::vector<double> out(by_model_.size());
        for (std::size_t x = 0; x < signals_; ++x)
            for (std::size_t y = 0; y < states_; ++y)
                for (std::size_t t = 0; t < models_; ++t)
                    out[(x * states_ + y) * models_ + t] = prob(x, y, t);
        return out;
    }

private:
    FiniteComplexObject() = default;

    void check_sizes() const {
        detail::require(signals_ > 0 && states_ > 0 && models_ > 0,
                        "object axes must be nonempty");
        auto check_labels = [](const std::vector<std::string>& labels, std::size_t n,
                               const char* axis) {
            detail::require(labels.empty() || labels.size() == n,
                            std::string("label count mismatch on axis ") + axis);
        };
        check_labels(labels_.signals, signals_, "signals");
        check_labels(labels_.states, states_, "states");
        check_labels(labels_.models, models_, "models");
    }

    void validate() const {
        for (std::size_t t = 0; t < models_; ++t) {
            double sum = 0.0;
            for (double p : model_table(t)) {
                detail::require(std::isfinite(p) && p >= 0.0,
                                "negative or non-finite probability in model " + std::to_string(t));
                sum += p;
            }
            detail::require(std::abs(sum - 1.0) <= kProbabilityTolerance,
                            "probabilities of model " + std::to_string(t) + " sum to " +
                                std::to_string(sum));
        }
    }

    std::size_t signals_ = 0;
    std::size_t states_ = 0;
    std::size_t models_ = 0;
    std::vector<double> by_model_;
    AxisLabels labels_;
};

/// w(y, y'): loss of deciding y' when the true state is y.
class LossMatrix {
public:
    LossMatrix(std::size_t states, std::vector<double> values) : states_(states), w_(std::move(values)) {
        detail::require(states > 0, "loss matrix needs at least one state");
        detail::require(w_.size() == states * states, "loss matrix must be square");
        for (double v : w_) detail::require(std::isfinite(v), "loss entries must be finite");
    }

    static LossMatrix zero_one(std::size_t states) {
        std::vector<double> w(states * states, 1.0);
        for (std::size_t y = 0; y < states; ++y) w[y * states + y] = 0.0;
        return {states, std::move(w)};
    }

    static LossMatrix zero(std::size_t states) { return {states, std::vector<double>(states * states, 0.0)}; }

    std::size_t state_count() const { return states_; }
    double operator()(std::size_t truth, std::size_t decision) const { return w_[truth * states_ + decision]; }
    const std::vector<double>& values() const { return w_; }
    double min() const { return *std::min_element(w_.begin(), w_.end()); }
    double max() const { return *std::max_element(w_.begin(), w_.end()); }

    bool is_zero_one() const {
        for (std::size_t a = 0; a < states_; ++a)
            for (std::size_t b = 0; b < states_; ++b)
                if ((*this)(a, b) != (a == b ? 0.0 : 1.0)) return false;
        return true;
    }

private:
    std::size_t states_;
    std::vector<double> w_;
};

/// Randomized strategy q(y'|x), row-major [x][y'].
class Strategy {
public:
    Strategy(std::size_t signals, std::size_t states, std::vector<double> q)
        : signals_(signals), states_(states), q_(std::move(q)) {
        detail::require(signals > 0 && states > 0, "strategy axes must be nonempty");
        detail::require(q_.size() == signals * states, "strategy table has wrong size");
        for (std::size_t x = 0; x < signals; ++x) {
            double sum = 0.0;
            for (std::size_t y = 0; y < states; ++y) {
                double v = q_[x * states + y];
                detail::require(std::isfinite(v) && v >= 0.0, "strategy entries must be nonnegative");
                sum += v;
            }
            detail::require(std::abs(sum - 1.0) <= kProbabilityTolerance,
                            "strategy row " + std::to_string(x) + " sums to " + std::to_string(sum));
        }
    }

    static Strategy deterministic(const Decisions& decisions, std::size_t states) {
        std::vector<double> q(decisions.size() * states, 0.0);
        for (std::size_t x = 0; x < decisions.size(); ++x) {
            detail::require(decisions[x] < states, "decision out of range");
            q[x * states + decisions[x]] = 1.0;
        }
        return {decisions.size(), states, std::move(q)};
    }

    static Strategy constant(std::size_t signals, std::size_t states, std::size_t decision) {
        return deterministic(Decisions(signals, decision), states);
    }

    std::size_t signal_count() const { return signals_; }
    std::size_t state_count() const { return states_; }
    double operator()(std::size_t x, std::size_t decision) const { return q_[x * states_ + decision]; }
    const std::vector<double>& values() const { return q_; }

    bool is_deterministic() const {
        return std::all_of(q_.begin(), q_.end(), [](double v) { return v == 0.0 || v == 1.0; });
    }

    /// Most probable decision per signal (the decision itself for deterministic strategies).
    Decisions decisions() const {
        Decisions out(signals_);
        for (std::size_t x = 0; x < signals_; ++x) {
            auto row = q_.begin() + static_cast<std::ptrdiff_t>(x * states_);
            out[x] = static_cast<std::size_t>(std::max_element(row, row + static_cast<std::ptrdiff_t>(states_)) - row);
        }
        return out;
    }

    friend bool operator==(const Strategy&, const Strategy&) = default;

private:
    std::size_t signals_;
    std::size_t states_;
    std::vector<double> q_;
};

/// λ·a + (1−λ)·b.
inline Strategy mix(double lambda, const Strategy& a, const Strategy& b) {
    detail::require(lambda >= 0.0 && lambda <= 1.0, "mixing weight must lie in [0,1]");
    detail::require(a.signal_count() == b.signal_count() && a.state_count() == b.state_count(),
                    "mixed strategies differ in shape");
    std::vector<double> q(a.values().size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = lambda * a.values()[i] + (1.0 - lambda) * b.values()[i];
    return {a.signal_count(), a.state_count(), std::move(q)};
}

/// Point τ of the probability simplex over Θ.
class WeightFunction {
public:
    explicit WeightFunction(std::vector<double> tau) : tau_(std::move(tau)) {
        detail::require(!tau_.empty(), "weight function needs at least one model");
        double sum = 0.0;
        for (double v : tau_) {
            detail::require(std::isfinite(v) && v >= 0.0, "weights must be nonnegative");
            sum += v;
        }
        detail::require(std::abs(sum - 1.0) <= kProbabilityTolerance,
                        "weights sum to " + std::to_string(sum) + ", not 1");
    }

    static WeightFunction uniform(std::size_t models) {
        detail::require(models > 0, "weight function needs at least one model");
        return WeightFunction(std::vector<double>(models, 1.0 / static_cast<double>(models)));
    }

    static WeightFunction point_mass(std::size_t models, std::size_t at) {
        detail::require(at < models, "point mass index out of range");
        std::vector<double> tau(models, 0.0);
        tau[at] = 1.0;
        return WeightFunction(std::move(tau));
    }

    /// Divides nonnegative weights by their (positive) sum.
    static WeightFunction normalized(std::vector<double> raw) {
        double sum = 0.0;
        for (double v : raw) {
            detail::require(std::isfinite(v) && v >= 0.0, "weights must be nonnegative");
            sum += v;
        }
        detail::require(sum > 0.0, "weights sum to zero");
        for (double& v : raw) v /= sum;
        return WeightFunction(std::move(raw));
    }

    std::size_t size() const { return tau_.size(); }
    double operator[](std::size_t i) const { return tau_[i]; }
    const std::vector<double>& values() const { return tau_; }

    friend bool operator==(const WeightFunction&, const WeightFunction&) = default;

private:
    std::vector<double> tau_;
};

namespace detail {

inline void check_loss(const FiniteComplexObject& object, const LossMatrix& loss) {
    require(loss.state_count() == object.state_count(),
            "loss matrix covers " + std::to_string(loss.state_count()) + " states, object has " +
                std::to_string(object.state_count()));
}

inline void check_strategy(const FiniteComplexObject& object, const Strategy& strategy) {
    require(strategy.signal_count() == object.signal_count() &&
                strategy.state_count() == object.state_count(),
            "strategy shape does not match the object");
}

inline void check_model(const FiniteComplexObject& object, ModelIndex model) {
    require(model.value < object.model_count(), "model index " + std::to_string(model.value) +
                                                    " out of range (|Θ| = " +
                                                    std::to_string(object.model_count()) + ")");
}

inline void check_weights(const FiniteComplexObject& object, const WeightFunction& weights) {
    require(weights.size() == object.model_count(), "weight function has wrong length");
}

}  // namespace detail

/// R(q,θ) = Σ_x Σ_y' Σ_y q(y'|x) p(x,y;θ) w(y,y').
inline double risk(const FiniteComplexObject& object, const LossMatrix& loss, const Strategy& strategy,
                   ModelIndex model) {
    detail::check_loss(object, loss);
    detail::check_strategy(object, strategy);
    detail::check_model(object, model);
    const std::size_t states = object.state_count();
    double total = 0.0;
    for (std::size_t x = 0; x < object.signal_count(); ++x) {
        for (std::size_t d = 0; d < states; ++d) {
            double q = strategy(x, d);
            if (q == 0.0) continue;
            double expected = 0.0;
            for (std::size_t y = 0; y < states; ++y) expected += object.prob(x, y, model.value) * loss(y, d);
            total += q * expected;
        }
    }
    return total;
}

/**
 * Expected-loss tables L_y'(θ, x) = Σ_y p(x,y;θ) w(y,y'), one |Θ|×|X| matrix
 * per decision y'. Every risk of a deterministic strategy is a sum of entries,
 * and Bayesian decisions for a batch of weight vectors are matrix products.
 */
class ExpectedLoss {
public:
    ExpectedLoss(const FiniteComplexObject& object, const LossMatrix& loss)
        : signals_(object.signal_count()), states_(object.state_count()), models_(object.model_count()) {
        detail::check_loss(object, loss);
        by_decision_.assign(states_, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(models_),
                                                          static_cast<Eigen::Index>(signals_)));
        for (std::size_t t = 0; t < models_; ++t)
            for (std::size_t x = 0; x < signals_; ++x)
                for (std::size_t d = 0; d < states_; ++d) {
                    double sum = 0.0;
                    for (std::size_t y = 0; y < states_; ++y) sum += object.prob(x, y, t) * loss(y, d);
                    by_decision_[d](static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(x)) = sum;
                }
    }

    std::size_t signal_count() const { return signals_; }
    std::size_t state_count() const { return states_; }
    std::size_t model_count() const { return models_; }

    double operator()(std::size_t model, std::size_t x, std::size_t decision) const {
        return by_decision_[decision](static_cast<Eigen::Index>(model), static_cast<Eigen::Index>(x));
    }

    double risk(const Decisions& decisions, std::size_t model) const {
        double total = 0.0;
        for (std::size_t x = 0; x < signals_; ++x) total += (*this)(model, x, decisions[x]);
        return total;
    }

    Decisions optimal_decisions(std::size_t model) const {
        Decisions out(signals_);
        for (std::size_t x = 0; x < signals_; ++x) out[x] = argmin_decision([&](std::size_t d) {
            return (*this)(model, x, d);
        });
        return out;
    }

    /// argmin_y' Σ_θ weights(θ) L_y'(θ, x); weights need not be normalized.
    Decisions bayes_decisions(std::span<const double> weights) const {
        Eigen::Map<const Eigen::RowVectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
        std::vector<Eigen::RowVectorXd> mixed(states_);
        for (std::size_t d = 0; d < states_; ++d) mixed[d] = w * by_decision_[d];
        Decisions out(signals_);
        for (std::size_t x = 0; x < signals_; ++x)
            out[x] = argmin_decision([&](std::size_t d) { return mixed[d](static_cast<Eigen::Index>(x)); });
        return out;
    }

    /**
     * Bayesian decisions for every row of `weights` (rows × |Θ|) and their
     * risks: returns the decisions (one vector per row) and fills `risks`
     * (rows × |Θ|) with R(decisions_row, θ).
     */
    std::vector<Decisions> bayes_batch(const Eigen::MatrixXd& weights, Eigen::MatrixXd& risks) const {
        const Eigen::Index rows = weights.rows();
        std::vector<Eigen::MatrixXd> mixed(states_);
        for (std::size_t d = 0; d < states_; ++d) mixed[d].noalias() = weights * by_decision_[d];
        std::vector<Decisions> decisions(static_cast<std::size_t>(rows), Decisions(signals_));
        Eigen::MatrixXd indicator;
        risks = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(models_));
        for (Eigen::Index r = 0; r < rows; ++r)
            for (std::size_t x = 0; x < signals_; ++x)
                decisions[static_cast<std::size_t>(r)][x] = argmin_decision(
                    [&](std::size_t d) { return mixed[d](r, static_cast<Eigen::Index>(x)); });
        for (std::size_t d = 0; d < states_; ++d) {
            indicator = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(signals_));
            bool any = false;
            for (Eigen::Index r = 0; r < rows; ++r)
                for (std::size_t x = 0; x < signals_; ++x)
                    if (decisions[static_cast<std::size_t>(r)][x] == d) {
                        indicator(r, static_cast<Eigen::Index>(x)) = 1.0;
                        any = true;
                    }
            if (any) risks.noalias() += indicator * by_decision_[d].transpose();
        }
        return decisions;
    }

private:
    template <typename Cost>
    std::size_t argmin_decision(Cost cost) const {
        std::size_t best = 0;
        double best_cost = cost(0);
        for (std::size_t d = 1; d < states_; ++d) {
            double c = cost(d);
            if (c < best_cost) {
                best = d;
                best_cost = c;
            }
        }
        return best;
    }

    std::size_t signals_;
    std::size_t states_;
    std::size_t models_;
    std::vector<Eigen::MatrixXd> by_decision_;
};

/// Deterministic argmin_q R(q,θ); ties go to the lowest state index.
inline Strategy optimal_strategy(const FiniteComplexObject& object, const LossMatrix& loss, ModelIndex model) {
    detail::check_model(object, model);
    return Strategy::deterministic(ExpectedLoss(object, loss).optimal_decisions(model.value),
                                   object.state_count());
}

inline double optimal_risk(const FiniteComplexObject& object, const LossMatrix& loss, ModelIndex model) {
    detail::check_model(object, model);
    ExpectedLoss table(object, loss);
    return table.risk(table.optimal_decisions(model.value), model.value);
}

/// min_q R(q,θ) for every θ.
inline std::vector<double> optimal_risks(const ExpectedLoss& table) {
    std::vector<double> out(table.model_count());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = table.risk(table.optimal_decisions(t), t);
    return out;
}

/// y* = argmin_y' Σ_y [Σ_θ τ(θ) p(x,y;θ)] w(y,y') for every x.
inline Strategy bayes_strategy(const FiniteComplexObject& object, const LossMatrix& loss,
                               const WeightFunction& weights) {
    detail::check_weights(object, weights);
    return Strategy::deterministic(ExpectedLoss(object, loss).bayes_decisions(weights.values()),
                                   object.state_count());
}

/// The 0-1 loss form y* = argmax_y Σ_θ τ(θ) p(x,y;θ).
inline Strategy bayes_strategy_zero_one(const FiniteComplexObject& object, const WeightFunction& weights) {
    detail::check_weights(object, weights);
    const std::size_t states = object.state_count();
    Decisions decisions(object.signal_count());
    for (std::size_t x = 0; x < object.signal_count(); ++x) {
        double best = -1.0;
        for (std::size_t y = 0; y < states; ++y) {
            double mass = 0.0;
            for (std::size_t t = 0; t < object.model_count(); ++t) mass += weights[t] * object.prob(x, y, t);
            if (mass > best) {
                best = mass;
                decisions[x] = y;
            }
        }
    }
    return Strategy::deterministic(decisions, states);
}

inline double regret(const FiniteComplexObject& object, const LossMatrix& loss, const Strategy& strategy,
                     ModelIndex model) {
    return risk(object, loss, strategy, model) - optimal_risk(object, loss, model);
}

/// True iff R(a,θ) < R(b,θ) for every θ (exact comparison).
inline bool predominates(const FiniteComplexObject& object, const LossMatrix& loss, const Strategy& a,
                         const Strategy& b) {
    for (std::size_t t = 0; t < object.model_count(); ++t)
        if (!(risk(object, loss, a, ModelIndex{t}) < risk(object, loss, b, ModelIndex{t}))) return false;
    return true;
}

/// y* = argmax_y max_θ p(x,y;θ), the joint maximum-likelihood decision.
inline Strategy max_likelihood_strategy(const FiniteComplexObject& object) {
    Decisions decisions(object.signal_count(), 0);
    for (std::size_t x = 0; x < object.signal_count(); ++x) {
        double best = -1.0;
        for (std::size_t y = 0; y < object.state_count(); ++y)
            for (std::size_t t = 0; t < object.model_count(); ++t)
                if (object.prob(x, y, t) > best) {
                    best = object.prob(x, y, t);
                    decisions[x] = y;
                }
    }
    return Strategy::deterministic(decisions, object.state_count());
}

}  // namespace cor
