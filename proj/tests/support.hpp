#pragma once

// Test-side references that do not go through the library.

#include <cmath>
#include <random>
#include <vector>

#include "cor/decision.hpp"

namespace testing_support {

/// Φ(x) = ½ + φ(x) Σ x^{2k+1}/(2k+1)!!, summed in long double.
inline double series_cdf(double xd) {
    long double x = xd;
    long double term = x;
    long double sum = x;
    for (int k = 1; k < 400; ++k) {
        term *= x * x / (2.0L * k + 1.0L);
        sum += term;
        if (std::fabs(term) < 1e-30L * std::fabs(sum)) break;
    }
    long double density = std::exp(-x * x / 2.0L) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
    return static_cast<double>(0.5L + density * sum);
}

/// Bayes risk of the Robbins model at θ: θΦ(α−1) + (1−θ)(1−Φ(α+1)), α = ½ln((1−θ)/θ).
inline double robbins_optimal_risk(double theta) {
    if (theta <= 0.0 || theta >= 1.0) return 0.0;
    double alpha = 0.5 * std::log((1.0 - theta) / theta);
    return theta * series_cdf(alpha - 1.0) + (1.0 - theta) * (1.0 - series_cdf(alpha + 1.0));
}

inline cor::FiniteComplexObject random_object(std::mt19937_64& rng, std::size_t signals, std::size_t states,
                                              std::size_t models) {
    std::exponential_distribution<double> exp(1.0);
    std::vector<std::vector<double>> tables(models, std::vector<double>(signals * states));
    for (auto& table : tables) {
        double sum = 0.0;
        for (double& v : table) sum += (v = exp(rng));
        for (double& v : table) v /= sum;
    }
    return cor::FiniteComplexObject::from_model_tables(signals, states, tables);
}

inline std::vector<double> random_simplex_point(std::mt19937_64& rng, std::size_t size) {
    std::exponential_distribution<double> exp(1.0);
    std::vector<double> v(size);
    double sum = 0.0;
    for (double& x : v) sum += (x = exp(rng));
    for (double& x : v) x /= sum;
    return v;
}

inline cor::Strategy random_strategy(std::mt19937_64& rng, std::size_t signals, std::size_t states) {
    std::vector<double> q;
    for (std::size_t x = 0; x < signals; ++x) {
        auto row = random_simplex_point(rng, states);
        q.insert(q.end(), row.begin(), row.end());
    }
    return {signals, states, q};
}

}  // namespace testing_support
