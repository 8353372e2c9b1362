#pragma once

// Learning-information sources p(z;θ), learning procedures g: Z -> Q, the
// expected risk R_Z and maximum-likelihood learning over a finite Θ.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cor/decision.hpp"
#include "cor/error.hpp"

namespace cor {

inline constexpr double kDefaultOutcomeBudget = 5e6;

/// What the tokens of a source outcome denote.
enum class SourceKind {
    none,     ///< no learning information, Z = {0}
    pairs,    ///< token = x * |Y| + y
    states,   ///< token = y
    signals,  ///< token = quantizer cell index
};

/**
 * A source <Z, Θ, p(z;θ)>. Each outcome optionally carries the tokens it was
 * built from (a sequence, or a sorted multiset when compressed) and a
 * display descriptor.
 */
class LearningSource {
public:
    LearningSource(std::size_t models, std::vector<double> prob, std::vector<std::string> descriptors = {},
                   std::vector<std::vector<std::size_t>> tokens = {}, SourceKind kind = SourceKind::none)
        : models_(models),
          prob_(std::move(prob)),
          descriptors_(std::move(descriptors)),
          tokens_(std::move(tokens)),
          kind_(kind) {
        detail::require(models_ > 0, "source needs at least one model");
        detail::require(!prob_.empty() && prob_.size() % models_ == 0,
                        "source probability table must be |Z| x |Θ|");
        const std::size_t outcomes = prob_.size() / models_;
        detail::require(descriptors_.empty() || descriptors_.size() == outcomes, "descriptor count mismatch");
        detail::require(tokens_.empty() || tokens_.size() == outcomes, "token list count mismatch");
        for (std::size_t t = 0; t < models_; ++t) {
            double sum = 0.0;
            for (std::size_t z = 0; z < outcomes; ++z) {
                double p = prob_[z * models_ + t];
                detail::require(std::isfinite(p) && p >= 0.0, "source probabilities must be nonnegative");
                sum += p;
            }
            detail::require(std::abs(sum - 1.0) <= kProbabilityTolerance,
                            "source probabilities of model " + std::to_string(t) + " sum to " +
                                std::to_string(sum));
        }
    }

    /// Z = {0}, p(0;θ) = 1.
    static LearningSource none(std::size_t models) {
        return {models, std::vector<double>(models, 1.0), {"none"}, {{}}, SourceKind::none};
    }

    std::size_t outcome_count() const { return prob_.size() / models_; }
    std::size_t model_count() const { return models_; }
    double prob(std::size_t z, std::size_t model) const { return prob_[z * models_ + model]; }
    const std::vector<double>& values() const { return prob_; }
    const std::vector<std::string>& descriptors() const { return descriptors_; }
    SourceKind kind() const { return kind_; }
    bool has_tokens() const { return !tokens_.empty(); }
    const std::vector<std::size_t>& tokens(std::size_t z) const { return tokens_.at(z); }

private:
    std::size_t models_;
    std::vector<double> prob_;
    std::vector<std::string> descriptors_;
    std::vector<std::vector<std::size_t>> tokens_;
    SourceKind kind_;
};

namespace detail {

inline void check_source(const FiniteComplexObject& object, const LearningSource& source) {
    require(source.model_count() == object.model_count(),
            "source covers " + std::to_string(source.model_count()) + " models, object has " +
                std::to_string(object.model_count()));
}

/// Number of outcomes as a double (saturates instead of overflowing).
inline double sequence_count(std::size_t alphabet, std::size_t n) {
    return std::pow(static_cast<double>(alphabet), static_cast<double>(n));
}

inline double multiset_count(std::size_t alphabet, std::size_t n) {
    if (n == 0) return 1.0;
    return std::round(std::exp(std::lgamma(static_cast<double>(alphabet + n)) -
                               std::lgamma(static_cast<double>(n + 1)) -
                               std::lgamma(static_cast<double>(alphabet))));
}

inline void check_budget(double outcomes, double budget) {
    if (outcomes > budget) {
        std::ostringstream msg;
        msg << "learning source would have " << outcomes << " outcomes, exceeding the outcome budget of "
            << budget;
        throw BudgetError(msg.str());
    }
}

inline std::string describe_tokens(SourceKind kind, const std::vector<std::size_t>& tokens, bool multiset) {
    std::ostringstream out;
    switch (kind) {
        case SourceKind::pairs: out << "pairs"; break;
        case SourceKind::states: out << "states"; break;
        case SourceKind::signals: out << "cells"; break;
        case SourceKind::none: out << "none"; break;
    }
    out << (multiset ? "{" : "(");
    for (std::size_t i = 0; i < tokens.size(); ++i) out << (i ? " " : "") << tokens[i];
    out << (multiset ? "}" : ")");
    return out.str();
}

/**
 * n i.i.d. draws from per-model symbol distributions `symbol_prob[a][θ]`,
 * either as ordered sequences or as multisets with multinomial weights.
 */
inline LearningSource iid_source(const std::vector<std::vector<double>>& symbol_prob, std::size_t models,
                                 std::size_t n, bool multiset, SourceKind kind, double budget) {
    const std::size_t alphabet = symbol_prob.size();
    require(alphabet > 0, "source alphabet is empty");
    if (n == 0) return LearningSource::none(models);
    check_budget(multiset ? multiset_count(alphabet, n) : sequence_count(alphabet, n), budget);

    std::vector<double> prob;
    std::vector<std::string> descriptors;
    std::vector<std::vector<std::size_t>> tokens;
    std::vector<std::size_t> current(n, 0);
    std::vector<double> log_p(models);
    const double log_n_factorial = std::lgamma(static_cast<double>(n + 1));

    while (true) {
        for (std::size_t t = 0; t < models; ++t) {
            double lp = multiset ? log_n_factorial : 0.0;
            bool impossible = false;
            std::size_t run = 0;
            for (std::size_t i = 0; i < n; ++i) {
                double p = symbol_prob[current[i]][t];
                if (p <= 0.0) {
                    impossible = true;
                    break;
                }
                lp += std::log(p);
                if (multiset) {
                    run = (i > 0 && current[i] == current[i - 1]) ? run + 1 : 1;
                    lp -= std::log(static_cast<double>(run));
                }
            }
            log_p[t] = impossible ? -std::numeric_limits<double>::infinity() : lp;
        }
        for (std::size_t t = 0; t < models; ++t) prob.push_back(std::exp(log_p[t]));
        descriptors.push_back(describe_tokens(kind, current, multiset));
        tokens.push_back(current);

        // Next sequence (odometer) or next nondecreasing sequence.
        std::size_t pos = n;
        while (pos > 0 && current[pos - 1] + 1 == alphabet) --pos;
        if (pos == 0) break;
        ++current[pos - 1];
        for (std::size_t i = pos; i < n; ++i) current[i] = multiset ? current[pos - 1] : 0;
    }

    // exp/log round-off; rescale so each model sums to one exactly enough.
    const std::size_t outcomes = tokens.size();
    for (std::size_t t = 0; t < models; ++t) {
        double sum = 0.0;
        for (std::size_t z = 0; z < outcomes; ++z) sum += prob[z * models + t];
        for (std::size_t z = 0; z < outcomes; ++z) prob[z * models + t] /= sum;
    }
    return {models, std::move(prob), std::move(descriptors), std::move(tokens), kind};
}

}  // namespace detail

/// What a supervised sample reveals about each of its n elements.
enum class Observation { pairs, states_only };

struct SourceOptions {
    bool compress = true;  ///< exchangeable quotient (multisets) instead of sequences
    double outcome_budget = kDefaultOutcomeBudget;
};

/// Source over (X×Y)^n (or Y^n for state-only samples) with product probabilities.
inline LearningSource supervised_source(const FiniteComplexObject& object, std::size_t n,
                                        Observation observation = Observation::pairs,
                                        SourceOptions options = {}) {
    const std::size_t models = object.model_count();
    std::vector<std::vector<double>> symbols;
    if (observation == Observation::pairs) {
        symbols.assign(object.signal_count() * object.state_count(), std::vector<double>(models));
        for (std::size_t x = 0; x < object.signal_count(); ++x)
            for (std::size_t y = 0; y < object.state_count(); ++y)
                for (std::size_t t = 0; t < models; ++t)
                    symbols[x * object.state_count() + y][t] = object.prob(x, y, t);
    } else {
        symbols.assign(object.state_count(), std::vector<double>(models, 0.0));
        for (std::size_t t = 0; t < models; ++t)
            for (std::size_t x = 0; x < object.signal_count(); ++x)
                for (std::size_t y = 0; y < object.state_count(); ++y) symbols[y][t] += object.prob(x, y, t);
    }
    return detail::iid_source(symbols, models, n, options.compress,
                              observation == Observation::pairs ? SourceKind::pairs : SourceKind::states,
                              options.outcome_budget);
}

/// Maps every signal of an object onto one of `cell_count` coarse cells.
struct Quantizer {
    std::vector<std::size_t> cell_of;
    std::size_t cell_count = 0;

    static Quantizer single_cell(std::size_t signals) { return {std::vector<std::size_t>(signals, 0), 1}; }
};

/**
 * Source over multisets (or sequences) of n quantized signals. With
 * `given_state` the signals are drawn from p(x | y = given_state; θ),
 * otherwise from the marginal Σ_y p(x,y;θ).
 */
inline LearningSource quantized_signal_source(const FiniteComplexObject& object, std::size_t n,
                                              const Quantizer& quantizer,
                                              std::optional<std::size_t> given_state = std::nullopt,
                                              SourceOptions options = {}) {
    detail::require(quantizer.cell_of.size() == object.signal_count(),
                    "quantizer does not cover every signal");
    detail::require(quantizer.cell_count > 0, "quantizer has no cells");
    if (given_state) detail::require(*given_state < object.state_count(), "conditioning state out of range");
    const std::size_t models = object.model_count();
    std::vector<std::vector<double>> cells(quantizer.cell_count, std::vector<double>(models, 0.0));
    for (std::size_t t = 0; t < models; ++t) {
        double state_mass = 0.0;
        for (std::size_t x = 0; x < object.signal_count(); ++x) {
            const std::size_t cell = quantizer.cell_of[x];
            detail::require(cell < quantizer.cell_count, "quantizer cell index out of range");
            double mass = given_state ? object.prob(x, *given_state, t) : object.signal_marginal(x, t);
            cells[cell][t] += mass;
            state_mass += mass;
        }
        if (given_state) {
            if (state_mass <= 0.0)
                throw ConfigurationError("state " + std::to_string(*given_state) + " has zero mass in model " +
                                         std::to_string(t));
            for (auto& cell : cells) cell[t] /= state_mass;
        }
    }
    return detail::iid_source(cells, models, n, options.compress, SourceKind::signals, options.outcome_budget);
}

/// Weights τ(θ)·p(z;θ), falling back to τ when they vanish for every θ.
inline std::vector<double> posterior_weights(const WeightFunction& weights, const LearningSource& source,
                                             std::size_t z) {
    std::vector<double> out(weights.size());
    double peak = 0.0;
    for (std::size_t t = 0; t < out.size(); ++t) {
        out[t] = weights[t] * source.prob(z, t);
        peak = std::max(peak, out[t]);
    }
    if (peak <= 0.0) return weights.values();
    for (double& v : out) v /= peak;
    return out;
}

/**
 * g_Z: Z -> Q, either an explicit strategy per outcome or the implicit
 * Bayesian procedure of a weight function, whose strategy for z is the
 * Bayesian strategy under the weights τ(θ)·p(z;θ).
 */
class LearningProcedure {
public:
    static LearningProcedure explicit_table(std::vector<Strategy> strategies) {
        detail::require(!strategies.empty(), "procedure table is empty");
        return LearningProcedure(std::move(strategies));
    }

    static LearningProcedure bayesian(WeightFunction weights) { return LearningProcedure(std::move(weights)); }

    bool is_implicit() const { return std::holds_alternative<WeightFunction>(form_); }
    const WeightFunction& weights() const { return std::get<WeightFunction>(form_); }
    const std::vector<Strategy>& table() const { return std::get<std::vector<Strategy>>(form_); }

    Strategy strategy_for(const FiniteComplexObject& object, const LossMatrix& loss, const LearningSource& source,
                          std::size_t z) const {
        detail::require(z < source.outcome_count(), "outcome index out of range");
        if (!is_implicit()) {
            detail::require(table().size() == source.outcome_count(),
                            "procedure table does not match the source outcome count");
            return table()[z];
        }
        const auto w = posterior_weights(weights(), source, z);
        return Strategy::deterministic(ExpectedLoss(object, loss).bayes_decisions(w), object.state_count());
    }

private:
    explicit LearningProcedure(std::vector<Strategy> table) : form_(std::move(table)) {}
    explicit LearningProcedure(WeightFunction weights) : form_(std::move(weights)) {}

    std::variant<std::vector<Strategy>, WeightFunction> form_;
};

/// Σ_x Σ_y' q(y'|x) L_y'(θ,x).
inline double table_risk(const ExpectedLoss& table, const Strategy& strategy, std::size_t model) {
    double total = 0.0;
    for (std::size_t x = 0; x < table.signal_count(); ++x)
        for (std::size_t d = 0; d < table.state_count(); ++d) {
            double q = strategy(x, d);
            if (q != 0.0) total += q * table(model, x, d);
        }
    return total;
}

/**
 * An object, a loss and a source bundled with the precomputed expected-loss
 * tables and optimal risks every evaluation reuses.
 */
class LearningProblem {
public:
    LearningProblem(FiniteComplexObject object, LossMatrix loss, LearningSource source)
        : object_(std::move(object)), loss_(std::move(loss)), source_(std::move(source)), table_(object_, loss_) {
        detail::check_source(object_, source_);
        optimal_ = optimal_risks(table_);
    }

    const FiniteComplexObject& object() const { return object_; }
    const LossMatrix& loss() const { return loss_; }
    const LearningSource& source() const { return source_; }
    const ExpectedLoss& table() const { return table_; }
    const std::vector<double>& optimal() const { return optimal_; }
    std::size_t model_count() const { return object_.model_count(); }

    /// R_Z(g,θ) for every θ.
    std::vector<double> expected_risks(const LearningProcedure& procedure) const {
        const std::size_t models = model_count();
        const std::size_t outcomes = source_.outcome_count();
        std::vector<double> out(models, 0.0);
        if (procedure.is_implicit()) {
            Eigen::MatrixXd weights(static_cast<Eigen::Index>(outcomes), static_cast<Eigen::Index>(models));
            for (std::size_t z = 0; z < outcomes; ++z) {
                const auto w = posterior_weights(procedure.weights(), source_, z);
                for (std::size_t t = 0; t < models; ++t)
                    weights(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(t)) = w[t];
            }
            Eigen::MatrixXd risks;
            table_.bayes_batch(weights, risks);
            for (std::size_t z = 0; z < outcomes; ++z)
                for (std::size_t t = 0; t < models; ++t)
                    out[t] += source_.prob(z, t) * risks(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(t));
            return out;
        }
        detail::require(procedure.table().size() == outcomes,
                        "procedure table does not match the source outcome count");
        for (std::size_t z = 0; z < outcomes; ++z) {
            const Strategy& strategy = procedure.table()[z];
            detail::check_strategy(object_, strategy);
            for (std::size_t t = 0; t < models; ++t) {
                double p = source_.prob(z, t);
                if (p != 0.0) out[t] += p * table_risk(table_, strategy, t);
            }
        }
        return out;
    }

    /// R_Z(g,θ) − min_q R(q,θ) for every θ.
    std::vector<double> regrets(const LearningProcedure& procedure) const {
        auto out = expected_risks(procedure);
        for (std::size_t t = 0; t < out.size(); ++t) out[t] -= optimal_[t];
        return out;
    }

private:
    FiniteComplexObject object_;
    LossMatrix loss_;
    LearningSource source_;
    ExpectedLoss table_;
    std::vector<double> optimal_;
};

/// R_Z(g,θ) = Σ_z p(z;θ) R(g(z),θ).
inline double expected_risk(const FiniteComplexObject& object, const LossMatrix& loss, const LearningSource& source,
                            const LearningProcedure& procedure, ModelIndex model) {
    detail::check_model(object, model);
    detail::check_source(object, source);
    double total = 0.0;
    for (std::size_t z = 0; z < source.outcome_count(); ++z) {
        double p = source.prob(z, model.value);
        if (p == 0.0) continue;
        total += p * risk(object, loss, procedure.strategy_for(object, loss, source, z), model);
    }
    return total;
}

inline LearningProcedure bayes_learning_procedure(const FiniteComplexObject& object, const LearningSource& source,
                                                  const WeightFunction& weights) {
    detail::check_weights(object, weights);
    detail::check_source(object, source);
    return LearningProcedure::bayesian(weights);
}

namespace detail {

/// argmax over models of log-likelihoods; −∞ never wins unless all are −∞.
inline std::size_t argmax_log_likelihood(const std::vector<double>& log_likelihood) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < log_likelihood.size(); ++t)
        if (log_likelihood[t] > log_likelihood[best]) best = t;
    if (std::isinf(log_likelihood[best]) && log_likelihood[best] < 0)
        throw LikelihoodError("sample impossible under every model");
    return best;
}

inline double log_or_minus_infinity(double p) {
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

struct LabeledSignal {
    std::size_t signal;
    std::size_t state;
};

/// θ^ML = argmax_θ Σ_i log p(x_i,y_i;θ), ties to the lowest index.
inline ModelIndex ml_supervised_estimate(const FiniteComplexObject& object,
                                         const std::vector<LabeledSignal>& sample) {
    detail::require(!sample.empty(), "maximum-likelihood learning needs a nonempty sample");
    std::vector<double> ll(object.model_count(), 0.0);
    for (const auto& [x, y] : sample) {
        detail::require(x < object.signal_count() && y < object.state_count(), "sample element out of range");
        for (std::size_t t = 0; t < ll.size(); ++t) ll[t] += detail::log_or_minus_infinity(object.prob(x, y, t));
    }
    return ModelIndex{detail::argmax_log_likelihood(ll)};
}

inline Strategy ml_supervised_learn(const FiniteComplexObject& object, const LossMatrix& loss,
                                    const std::vector<LabeledSignal>& sample) {
    return optimal_strategy(object, loss, ml_supervised_estimate(object, sample));
}

/// θ^ML = argmax_θ Σ_i log Σ_y p(x_i,y;θ).
inline ModelIndex ml_unsupervised_estimate(const FiniteComplexObject& object, const std::vector<std::size_t>& sample) {
    detail::require(!sample.empty(), "maximum-likelihood learning needs a nonempty sample");
    std::vector<double> ll(object.model_count(), 0.0);
    for (std::size_t x : sample) {
        detail::require(x < object.signal_count(), "sample signal out of range");
        for (std::size_t t = 0; t < ll.size(); ++t)
            ll[t] += detail::log_or_minus_infinity(object.signal_marginal(x, t));
    }
    return ModelIndex{detail::argmax_log_likelihood(ll)};
}

inline Strategy ml_unsupervised_learn(const FiniteComplexObject& object, const LossMatrix& loss,
                                      const std::vector<std::size_t>& sample) {
    return optimal_strategy(object, loss, ml_unsupervised_estimate(object, sample));
}

/// argmax_θ p(z;θ): the maximum-likelihood model given the learning outcome itself.
inline ModelIndex ml_estimate_from_outcome(const LearningSource& source, std::size_t z) {
    std::vector<double> ll(source.model_count());
    for (std::size_t t = 0; t < ll.size(); ++t) ll[t] = detail::log_or_minus_infinity(source.prob(z, t));
    return ModelIndex{detail::argmax_log_likelihood(ll)};
}

}  // namespace cor
