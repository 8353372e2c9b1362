#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "cor/decision.hpp"
#include "cor/error.hpp"

namespace cor {

inline constexpr double kDefaultProjectionTolerance = 1e-12;

namespace detail {

/**
 * Exact support refinement: λ = (Σ_{i∈S} v_i − 1)/|S|, S ← {i : v_i > λ},
 * until S is stable. This is Newton's method on the piecewise-linear
 * f(λ) = Σ max(v_i − λ, 0) − 1 and stops after finitely many steps from any
 * nonempty start.
 */
inline std::vector<double> redistribute_over_support(std::span<const double> v, std::vector<bool> support) {
    const std::size_t n = v.size();
    double lambda = 0.0;
    for (std::size_t guard = 0; guard <= n + 1; ++guard) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (support[i]) {
                sum += v[i];
                ++count;
            }
        if (count == 0) {
            // Every coordinate was dropped; restart from the largest one.
            std::size_t top = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
            support[top] = true;
            continue;
        }
        lambda = (sum - 1.0) / static_cast<double>(count);
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            bool inside = v[i] - lambda > 0.0;
            if (inside != support[i]) {
                support[i] = inside;
                changed = true;
            }
        }
        if (!changed) break;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = support[i] ? std::max(v[i] - lambda, 0.0) : 0.0;
    // Residual round-off goes to the largest coordinate.
    double sum = std::accumulate(out.begin(), out.end(), 0.0);
    auto top = std::max_element(out.begin(), out.end());
    *top = std::max(*top + (1.0 - sum), 0.0);
    return out;
}

}  // namespace detail

/**
 * Euclidean projection argmin_{τ'∈T} |τ' − v|² onto the probability simplex.
 *
 * Runs the recenter-and-clip loop (shift every coordinate by (Σ−1)/|Θ|, stop
 * when no coordinate is below −tolerance, otherwise clip negatives to zero and
 * repeat), then redistributes exactly over the positive support it found.
 */
inline WeightFunction project_to_simplex(std::span<const double> v,
                                         double tolerance = kDefaultProjectionTolerance) {
    detail::require(!v.empty(), "cannot project an empty vector");
    for (double x : v) detail::require(std::isfinite(x), "projection input must be finite");
    const std::size_t n = v.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> tau(v.begin(), v.end());
    constexpr std::size_t kMaxSweeps = 10000;
    for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double shift = (std::accumulate(tau.begin(), tau.end(), 0.0) - 1.0) * inv_n;
        for (double& x : tau) x -= shift;
        if (*std::min_element(tau.begin(), tau.end()) >= -tolerance) break;
        for (double& x : tau) x = std::max(x, 0.0);
    }
    std::vector<bool> support(n);
    for (std::size_t i = 0; i < n; ++i) support[i] = tau[i] > tolerance;
    return WeightFunction(detail::redistribute_over_support(v, std::move(support)));
}

inline WeightFunction project_to_simplex(const std::vector<double>& v,
                                         double tolerance = kDefaultProjectionTolerance) {
    return project_to_simplex(std::span<const double>(v), tolerance);
}

}  // namespace cor
