#pragma once

// Supergradient ascent on the concave dual Φ(τ) with the S/s duality-gap
// stopping rule, for the closest-to-optimal (regret) and minimax objectives.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "cor/decision.hpp"
#include "cor/learning.hpp"
#include "cor/simplex.hpp"

namespace cor {

enum class Objective {
    closest_to_optimal,  ///< Δ(θ) = R_Z(g,θ) − min_q R(q,θ)
    minimax,             ///< Δ(θ) = R_Z(g,θ)
};

/// γ_i for i = 1, 2, ...; both kinds vanish and have a divergent sum.
struct StepSchedule {
    enum class Kind { inverse_sqrt, harmonic };
    Kind kind = Kind::inverse_sqrt;
    /// γ_0; when unset, 1 / (1 + max_θ Δ(θ)) at the initial weights.
    std::optional<double> initial_step;

    double step(std::size_t iteration, double initial) const {
        const double i = static_cast<double>(iteration);
        return kind == Kind::inverse_sqrt ? initial / std::sqrt(i) : initial / i;
    }
};

struct SolverConfig {
    double epsilon = 0.01;
    StepSchedule schedule{};
    std::size_t max_iterations = 20000;
    std::optional<WeightFunction> initial_weights;
    double projection_tolerance = kDefaultProjectionTolerance;
    bool record_weights = true;
};

struct IterationRecord {
    std::size_t iteration = 0;
    std::vector<double> weights;  ///< empty unless SolverConfig::record_weights
    std::vector<double> delta;
    double max_delta = 0.0;   ///< Δ: quality of the current procedure
    double mean_delta = 0.0;  ///< Δ̄ = Φ(τ)
    double upper = 0.0;       ///< S after this iteration
    double lower = 0.0;       ///< s after this iteration
};

struct SolverTrace {
    std::vector<IterationRecord> records;
    std::size_t best_procedure_iteration = 0;
    std::size_t best_weights_iteration = 0;
};

struct SolveResult {
    LearningProcedure procedure;  ///< Bayesian procedure achieving S
    WeightFunction best_weights;  ///< weights achieving s
    double upper = 0.0;           ///< S
    double lower = 0.0;           ///< s
    bool converged = false;
    std::vector<double> procedure_delta;  ///< Δ(θ) of `procedure`
    SolverTrace trace;

    double gap() const { return upper - lower; }
};

inline void validate(const SolverConfig& config, std::size_t models) {
    detail::require(config.epsilon > 0.0 && std::isfinite(config.epsilon), "epsilon must be positive");
    detail::require(config.max_iterations > 0, "max_iterations must be positive");
    detail::require(config.projection_tolerance >= 0.0, "projection tolerance must be nonnegative");
    if (config.schedule.initial_step)
        detail::require(*config.schedule.initial_step > 0.0 && std::isfinite(*config.schedule.initial_step),
                        "initial step must be positive");
    if (config.initial_weights)
        detail::require(config.initial_weights->size() == models, "initial weights have wrong length");
}

/// Δ(θ) for the Bayesian procedure of `weights`.
inline std::vector<double> supergradient(const LearningProblem& problem, const WeightFunction& weights,
                                         Objective objective = Objective::closest_to_optimal) {
    detail::require(weights.size() == problem.model_count(), "weight function has wrong length");
    const auto procedure = LearningProcedure::bayesian(weights);
    return objective == Objective::minimax ? problem.expected_risks(procedure) : problem.regrets(procedure);
}

/// Φ(τ) = min_g Σ τ(θ) R_Z(g,θ) − Σ τ(θ) offset(θ).
inline double phi(const LearningProblem& problem, const WeightFunction& weights,
                  Objective objective = Objective::closest_to_optimal) {
    const auto delta = supergradient(problem, weights, objective);
    return std::inner_product(delta.begin(), delta.end(), weights.values().begin(), 0.0);
}

inline std::vector<double> supergradient(const FiniteComplexObject& object, const LossMatrix& loss,
                                         const LearningSource& source, const WeightFunction& weights) {
    return supergradient(LearningProblem(object, loss, source), weights);
}

inline double phi(const FiniteComplexObject& object, const LossMatrix& loss, const LearningSource& source,
                  const WeightFunction& weights) {
    return phi(LearningProblem(object, loss, source), weights);
}

inline SolveResult solve(const LearningProblem& problem, const SolverConfig& config, Objective objective) {
    const std::size_t models = problem.model_count();
    validate(config, models);

    WeightFunction tau = config.initial_weights.value_or(WeightFunction::uniform(models));
    std::optional<WeightFunction> best_procedure_weights;
    std::optional<WeightFunction> best_weights;
    std::vector<double> best_delta;
    double upper = std::numeric_limits<double>::infinity();
    double lower = -std::numeric_limits<double>::infinity();
    double initial_step = 0.0;
    bool converged = false;
    SolverTrace trace;
    std::vector<double> moved(models);

    for (std::size_t i = 1; i <= config.max_iterations; ++i) {
        const auto delta = supergradient(problem, tau, objective);
        const double max_delta = *std::max_element(delta.begin(), delta.end());
        const double mean_delta = std::inner_product(delta.begin(), delta.end(), tau.values().begin(), 0.0);
        if (i == 1) initial_step = config.schedule.initial_step.value_or(1.0 / (1.0 + max_delta));

        if (max_delta < upper) {
            upper = max_delta;
            best_procedure_weights = tau;
            best_delta = delta;
            trace.best_procedure_iteration = i;
        }
        if (mean_delta > lower) {
            lower = mean_delta;
            best_weights = tau;
            trace.best_weights_iteration = i;
        }
        trace.records.push_back({i, config.record_weights ? tau.values() : std::vector<double>{}, delta, max_delta,
                                 mean_delta, upper, lower});
        if (upper - lower < config.epsilon) {
            converged = true;
            break;
        }
        const double gamma = config.schedule.step(i, initial_step);
        for (std::size_t t = 0; t < models; ++t) moved[t] = tau[t] + gamma * delta[t];
        tau = project_to_simplex(moved, config.projection_tolerance);
    }

    return {LearningProcedure::bayesian(*best_procedure_weights),
            *best_weights,
            upper,
            lower,
            converged,
            std::move(best_delta),
            std::move(trace)};
}

inline SolveResult solve_closest_to_optimal(const LearningProblem& problem, const SolverConfig& config = {}) {
    return solve(problem, config, Objective::closest_to_optimal);
}

inline SolveResult solve_minimax(const LearningProblem& problem, const SolverConfig& config = {}) {
    return solve(problem, config, Objective::minimax);
}

inline SolveResult solve_closest_to_optimal(const FiniteComplexObject& object, const LossMatrix& loss,
                                            const LearningSource& source, const SolverConfig& config = {}) {
    return solve_closest_to_optimal(LearningProblem(object, loss, source), config);
}

inline SolveResult solve_minimax(const FiniteComplexObject& object, const LossMatrix& loss,
                                 const LearningSource& source, const SolverConfig& config = {}) {
    return solve_minimax(LearningProblem(object, loss, source), config);
}

}  // namespace cor
