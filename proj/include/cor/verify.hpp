#pragma once

// Oracle-backed property suites. Each suite draws random inputs from a fixed
// seed, compares library results with the brute-force references, and keeps
// the first violating input as JSON for replay.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cor/decision.hpp"
#include "cor/io.hpp"
#include "cor/learning.hpp"
#include "cor/oracles.hpp"
#include "cor/simplex.hpp"
#include "cor/solver.hpp"

namespace cor::verify {

inline constexpr std::uint64_t kDefaultSeed = 20240607;

struct SuiteReport {
    std::string name;
    std::size_t cases = 0;
    std::size_t checks = 0;
    std::size_t violations = 0;
    double worst_deviation = 0.0;
    double tolerance = 0.0;
    std::optional<nlohmann::json> first_violation;

    bool passed() const { return violations == 0; }

    /// Records |deviation| against the suite tolerance; `input` is built only on the first failure.
    template <typename MakeInput>
    void check(double deviation, MakeInput make_input) {
        check(deviation, tolerance, make_input);
    }

    template <typename MakeInput>
    void check(double deviation, double bound, MakeInput make_input) {
        ++checks;
        if (!(deviation <= bound)) {
            ++violations;
            if (!first_violation) first_violation = make_input();
        }
        if (std::isnan(deviation)) deviation = std::numeric_limits<double>::infinity();
        worst_deviation = std::max(worst_deviation, deviation);
    }
};

inline void print(std::ostream& out, const SuiteReport& r) {
    out << r.name << ": " << (r.passed() ? "pass" : "FAIL") << "  cases=" << r.cases << " checks=" << r.checks
        << " violations=" << r.violations << " worst_deviation=" << io::format_number(r.worst_deviation)
        << " tolerance=" << io::format_number(r.tolerance) << '\n';
    if (r.first_violation) out << "  replay: " << r.first_violation->dump() << '\n';
}

namespace detail {

using Rng = std::mt19937_64;

inline std::size_t uniform_size(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<double> random_distribution(Rng& rng, std::size_t size) {
    std::exponential_distribution<double> exp(1.0);
    std::vector<double> v(size);
    double sum = 0.0;
    for (double& x : v) sum += (x = exp(rng));
    for (double& x : v) x /= sum;
    return v;
}

/// Random object with |X|, |Y|, |Θ| in [2, max_dim] and |Y|^|X| kept enumerable.
inline FiniteComplexObject random_object(Rng& rng, std::size_t max_dim, std::size_t signals = 0,
                                         std::size_t states = 0, std::size_t models = 0) {
    if (!signals) signals = uniform_size(rng, 2, max_dim);
    if (!states) states = uniform_size(rng, 2, max_dim);
    if (!models) models = uniform_size(rng, 2, max_dim);
    std::vector<std::vector<double>> tables;
    for (std::size_t t = 0; t < models; ++t) tables.push_back(random_distribution(rng, signals * states));
    return FiniteComplexObject::from_model_tables(signals, states, tables);
}

inline LossMatrix random_loss(Rng& rng, std::size_t states) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(states * states);
    for (std::size_t y = 0; y < states; ++y)
        for (std::size_t d = 0; d < states; ++d) w[y * states + d] = y == d ? 0.0 : u(rng);
    return {states, w};
}

/// Random |Z| x |Θ| source with |Z| in [1, 8].
inline LearningSource random_source(Rng& rng, std::size_t models) {
    const std::size_t outcomes = uniform_size(rng, 1, 8);
    std::vector<double> prob(outcomes * models);
    for (std::size_t t = 0; t < models; ++t) {
        auto column = random_distribution(rng, outcomes);
        for (std::size_t z = 0; z < outcomes; ++z) prob[z * models + t] = column[z];
    }
    return {models, std::move(prob)};
}

inline nlohmann::json instance_json(const FiniteComplexObject& object, const LossMatrix& loss,
                                    const LearningSource* source = nullptr) {
    nlohmann::json j{{"object", io::to_json(object)}, {"loss", io::to_json(loss)}};
    if (source) j["source"] = io::to_json(*source);
    return j;
}

}  // namespace detail

/// Simplex projection against the sort-based oracle: feasibility, idempotence, agreement.
inline SuiteReport projection_suite(std::size_t cases = 10000, std::uint64_t seed = kDefaultSeed) {
    SuiteReport r{"projection", cases};
    r.tolerance = 1e-9;
    detail::Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> scale(0.01, 20.0);
    for (std::size_t c = 0; c < cases; ++c) {
        const std::size_t dim = detail::uniform_size(rng, 2, 64);
        const double s = scale(rng);
        std::vector<double> v(dim);
        for (double& x : v) x = s * normal(rng);
        auto input = [&] { return nlohmann::json{{"v", v}}; };

        const auto p = project_to_simplex(v);
        double sum = 0.0;
        double min = std::numeric_limits<double>::infinity();
        for (double x : p.values()) {
            sum += x;
            min = std::min(min, x);
        }
        r.check(std::abs(sum - 1.0), 1e-12, input);
        r.check(std::max(0.0, -min), input);

        const auto again = project_to_simplex(p.values());
        const auto oracle = oracles::sort_projection(v);
        double idempotence = 0.0;
        double agreement = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            idempotence = std::max(idempotence, std::abs(again[i] - p[i]));
            agreement = std::max(agreement, std::abs(oracle[i] - p[i]));
        }
        r.check(idempotence, input);
        r.check(agreement, input);
    }
    return r;
}

/**
 * Φ on random tiny learning instances: equals the enumeration oracle,
 * concave along random segments, and Δ is a supergradient.
 */
inline SuiteReport concavity_suite(std::size_t cases = 1000, std::uint64_t seed = kDefaultSeed + 1) {
    SuiteReport r{"concavity", cases};
    r.tolerance = 1e-9;
    detail::Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t c = 0; c < cases; ++c) {
        auto object = detail::random_object(rng, 3);
        auto loss = detail::random_loss(rng, object.state_count());
        auto source = detail::random_source(rng, object.model_count());
        const WeightFunction tau(detail::random_distribution(rng, object.model_count()));
        const WeightFunction tau2(detail::random_distribution(rng, object.model_count()));
        const double lambda = unit(rng);
        auto input = [&] {
            auto j = detail::instance_json(object, loss, &source);
            j["tau"] = tau.values();
            j["tau_prime"] = tau2.values();
            j["lambda"] = lambda;
            return j;
        };

        LearningProblem problem(object, loss, source);
        const double phi1 = phi(problem, tau);
        const double phi2 = phi(problem, tau2);
        const auto delta = supergradient(problem, tau);

        r.check(std::abs(phi1 - oracles::brute_force_phi(object, loss, source, tau.values())), input);

        std::vector<double> mixed(object.model_count());
        for (std::size_t t = 0; t < mixed.size(); ++t) mixed[t] = lambda * tau[t] + (1.0 - lambda) * tau2[t];
        const double phi_mixed = phi(problem, WeightFunction::normalized(mixed));
        r.check(std::max(0.0, lambda * phi1 + (1.0 - lambda) * phi2 - phi_mixed), input);

        double linear = phi1;
        for (std::size_t t = 0; t < delta.size(); ++t) linear += delta[t] * (tau2[t] - tau[t]);
        r.check(std::max(0.0, phi2 - linear), input);
    }
    return r;
}

/// Bayes strategies against exhaustive enumeration and the domination search.
inline SuiteReport optimality_suite(std::size_t cases = 1000, std::uint64_t seed = kDefaultSeed + 2) {
    SuiteReport r{"optimality", cases};
    r.tolerance = 1e-9;
    detail::Rng rng(seed);
    for (std::size_t c = 0; c < cases; ++c) {
        auto object = detail::random_object(rng, 4);
        auto loss = detail::random_loss(rng, object.state_count());
        const WeightFunction tau(detail::random_distribution(rng, object.model_count()));
        auto input = [&] {
            auto j = detail::instance_json(object, loss);
            j["tau"] = tau.values();
            return j;
        };

        const auto bayes = bayes_strategy(object, loss, tau);
        double weighted = 0.0;
        for (std::size_t t = 0; t < object.model_count(); ++t)
            weighted += tau[t] * oracles::brute_risk(object, loss, bayes, t);
        const double minimum = oracles::brute_force_weighted_minimum(object, loss, tau.values());
        r.check(std::max(0.0, weighted - minimum), input);
        r.check(oracles::domination_search(object, loss, bayes) ? std::numeric_limits<double>::infinity() : 0.0,
                input);
    }
    return r;
}

/**
 * Exchangeable compression: on 2x2 objects with n <= 2, multiset and
 * sequence sources give the same expected risk for Bayesian and ML procedures.
 */
inline SuiteReport compression_suite(std::size_t cases = 200, std::uint64_t seed = kDefaultSeed + 3) {
    SuiteReport r{"compression", cases};
    r.tolerance = 1e-9;
    detail::Rng rng(seed);
    const SourceOptions sequences{false};
    const SourceOptions multisets{true};
    for (std::size_t c = 0; c < cases; ++c) {
        auto object = detail::random_object(rng, 3, 2, 2);
        auto loss = detail::random_loss(rng, 2);
        const WeightFunction tau(detail::random_distribution(rng, object.model_count()));
        const std::size_t n = detail::uniform_size(rng, 1, 2);

        std::vector<std::pair<LearningSource, LearningSource>> pairs;
        for (auto obs : {Observation::pairs, Observation::states_only})
            pairs.emplace_back(supervised_source(object, n, obs, sequences),
                               supervised_source(object, n, obs, multisets));
        const auto identity = Quantizer{{0, 1}, 2};
        pairs.emplace_back(quantized_signal_source(object, n, identity, std::nullopt, sequences),
                           quantized_signal_source(object, n, identity, std::nullopt, multisets));

        for (const auto& [seq, multi] : pairs) {
            auto input = [&, &seq = seq] {
                auto j = detail::instance_json(object, loss, &seq);
                j["tau"] = tau.values();
                j["n"] = n;
                return j;
            };
            auto ml = [&](const LearningSource& source) {
                std::vector<Strategy> table;
                for (std::size_t z = 0; z < source.outcome_count(); ++z)
                    table.push_back(optimal_strategy(object, loss, cor::ml_estimate_from_outcome(source, z)));
                return LearningProcedure::explicit_table(std::move(table));
            };
            const auto bayes = LearningProcedure::bayesian(tau);
            const auto ml_seq = ml(seq);
            const auto ml_multi = ml(multi);
            for (std::size_t t = 0; t < object.model_count(); ++t) {
                r.check(std::abs(expected_risk(object, loss, seq, bayes, ModelIndex{t}) -
                                 expected_risk(object, loss, multi, bayes, ModelIndex{t})),
                        input);
                r.check(std::abs(expected_risk(object, loss, seq, ml_seq, ModelIndex{t}) -
                                 expected_risk(object, loss, multi, ml_multi, ModelIndex{t})),
                        input);
            }
        }
    }
    return r;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"projection", "concavity", "optimality", "compression", "all"};
    return names;
}

/// Runs one named suite, or every suite for "all".
inline std::vector<SuiteReport> run_suite(const std::string& name) {
    if (name == "projection") return {projection_suite()};
    if (name == "concavity") return {concavity_suite()};
    if (name == "optimality") return {optimality_suite()};
    if (name == "compression") return {compression_suite()};
    if (name == "all") return {projection_suite(), concavity_suite(), optimality_suite(), compression_suite()};
    throw ConfigurationError("unknown verify suite '" + name +
                             "' (expected projection, concavity, optimality, compression or all)");
}

}  // namespace cor::verify
