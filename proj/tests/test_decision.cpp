#include <gtest/gtest.h>

#include <random>

#include "cor/decision.hpp"
#include "cor/oracles.hpp"
#include "support.hpp"

using namespace cor;
using testing_support::random_object;
using testing_support::random_simplex_point;
using testing_support::random_strategy;

namespace {

FiniteComplexObject uniform_2x2x1() { return {2, 2, 1, std::vector<double>(4, 0.25)}; }

}  // namespace

TEST(Object, RejectsNegativeAndUnnormalizedTensors) {
    EXPECT_THROW(FiniteComplexObject(1, 2, 1, {1.2, -0.2}), ConfigurationError);
    EXPECT_THROW(FiniteComplexObject(1, 2, 1, {0.5, 0.4}), ConfigurationError);
    EXPECT_THROW(FiniteComplexObject(1, 2, 1, {1.0}), ConfigurationError);
    EXPECT_NO_THROW(FiniteComplexObject(1, 2, 1, {0.5, 0.5 + 1e-10}));
}

TEST(Object, JointLayoutIsSignalStateModel) {
    // p[x][y][θ] with x=1,y=0,θ=1 at index (1*2+0)*2+1 = 5
    std::vector<double> joint{0.1, 0.4, 0.2, 0.1, 0.3, 0.2, 0.4, 0.3};
    FiniteComplexObject object(2, 2, 2, joint);
    EXPECT_DOUBLE_EQ(object.prob(1, 0, 1), 0.2);
    EXPECT_DOUBLE_EQ(object.prob(0, 1, 0), 0.2);
    EXPECT_EQ(object.joint_row_major(), joint);
}

TEST(Strategy, RejectsRowsOffTheSimplex) {
    EXPECT_THROW(Strategy(1, 2, {0.7, 0.2}), ConfigurationError);
    EXPECT_THROW(Strategy(1, 2, {1.1, -0.1}), ConfigurationError);
    EXPECT_THROW(Strategy::deterministic({2}, 2), ConfigurationError);
}

TEST(Weights, RejectsOffSimplex) {
    EXPECT_THROW(WeightFunction({0.5, 0.6}), ConfigurationError);
    EXPECT_THROW(WeightFunction({}), ConfigurationError);
    EXPECT_EQ(WeightFunction::normalized({2.0, 6.0}).values(), (std::vector<double>{0.25, 0.75}));
}

TEST(Risk, ZeroLossGivesZero) {
    std::mt19937_64 rng(1);
    auto object = random_object(rng, 3, 3, 2);
    auto q = random_strategy(rng, 3, 3);
    for (std::size_t t = 0; t < 2; ++t) EXPECT_EQ(risk(object, LossMatrix::zero(3), q, ModelIndex{t}), 0.0);
}

TEST(Risk, UniformObjectUniformStrategy) {
    // Σ_x Σ_y' Σ_y ½ · ¼ · [y ≠ y'] = 8 terms of which 4 are off-diagonal
    Strategy q(2, 2, {0.5, 0.5, 0.5, 0.5});
    EXPECT_NEAR(risk(uniform_2x2x1(), LossMatrix::zero_one(2), q, ModelIndex{0}), 0.5, 1e-15);
}

TEST(Risk, DimensionMismatchIsConfigurationError) {
    auto object = uniform_2x2x1();
    EXPECT_THROW(risk(object, LossMatrix::zero_one(3), Strategy::constant(2, 2, 0), ModelIndex{0}),
                 ConfigurationError);
    EXPECT_THROW(risk(object, LossMatrix::zero_one(2), Strategy::constant(3, 2, 0), ModelIndex{0}),
                 ConfigurationError);
    EXPECT_THROW(risk(object, LossMatrix::zero_one(2), Strategy::constant(2, 2, 0), ModelIndex{1}),
                 ConfigurationError);
}

TEST(Risk, MatchesBruteForceAndStaysWithinLossRange) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto object = random_object(rng, 3, 3, 2);
        std::vector<double> w(9);
        for (double& v : w) v = u(rng);
        LossMatrix loss(3, w);
        auto q = random_strategy(rng, 3, 3);
        for (std::size_t t = 0; t < 2; ++t) {
            double r = risk(object, loss, q, ModelIndex{t});
            EXPECT_NEAR(r, oracles::brute_risk(object, loss, q, t), 1e-12);
            EXPECT_GE(r, loss.min() - 1e-12);
            EXPECT_LE(r, loss.max() + 1e-12);
        }
    }
}

TEST(Risk, LinearInStrategy) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        auto object = random_object(rng, 4, 3, 2);
        auto loss = LossMatrix::zero_one(3);
        auto a = random_strategy(rng, 4, 3);
        auto b = random_strategy(rng, 4, 3);
        double lambda = unit(rng);
        for (std::size_t t = 0; t < 2; ++t) {
            ModelIndex m{t};
            EXPECT_NEAR(risk(object, loss, mix(lambda, a, b), m),
                        lambda * risk(object, loss, a, m) + (1.0 - lambda) * risk(object, loss, b, m), 1e-9);
        }
    }
}

TEST(OptimalStrategy, ZeroLossChoosesStateZero) {
    std::mt19937_64 rng(4);
    auto object = random_object(rng, 3, 3, 1);
    EXPECT_EQ(optimal_strategy(object, LossMatrix::zero(3), ModelIndex{0}), Strategy::constant(3, 3, 0));
}

TEST(OptimalStrategy, MatchesExhaustiveEnumerationOnRandom2x2x2) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto object = random_object(rng, 2, 2, 2);
        auto loss = LossMatrix::zero_one(2);
        for (std::size_t t = 0; t < 2; ++t) {
            auto q = optimal_strategy(object, loss, ModelIndex{t});
            EXPECT_TRUE(q.is_deterministic());
            EXPECT_EQ(q, oracles::brute_force_optimal(object, loss, t));
        }
    }
}

TEST(OptimalRisk, ZeroLossIsZero) {
    std::mt19937_64 rng(6);
    auto object = random_object(rng, 3, 2, 2);
    EXPECT_EQ(optimal_risk(object, LossMatrix::zero(2), ModelIndex{1}), 0.0);
}

TEST(OptimalRisk, SingleStateForcesTheOnlyDecision) {
    FiniteComplexObject object(3, 1, 1, {0.2, 0.3, 0.5});
    LossMatrix loss(1, {0.7});
    EXPECT_NEAR(optimal_risk(object, loss, ModelIndex{0}), 0.7, 1e-15);
}

TEST(OptimalRisk, NeverExceedsAnyStrategyRisk) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        auto object = random_object(rng, 3, 3, 2);
        auto loss = LossMatrix::zero_one(3);
        auto q = random_strategy(rng, 3, 3);
        for (std::size_t t = 0; t < 2; ++t) {
            EXPECT_LE(optimal_risk(object, loss, ModelIndex{t}), risk(object, loss, q, ModelIndex{t}) + 1e-12);
            EXPECT_NEAR(optimal_risk(object, loss, ModelIndex{t}), oracles::brute_force_optimal_risk(object, loss, t),
                        1e-12);
        }
    }
}

TEST(Bayes, PointMassReducesToOptimalStrategy) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        auto object = random_object(rng, 4, 3, 3);
        auto loss = LossMatrix::zero_one(3);
        for (std::size_t t = 0; t < 3; ++t)
            EXPECT_EQ(bayes_strategy(object, loss, WeightFunction::point_mass(3, t)),
                      optimal_strategy(object, loss, ModelIndex{t}));
    }
}

TEST(Bayes, BeatsRandomStrategiesOnRandom3x3x3) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        auto object = random_object(rng, 3, 3, 3);
        auto loss = LossMatrix::zero_one(3);
        WeightFunction tau(random_simplex_point(rng, 3));
        auto weighted = [&](const Strategy& q) {
            double s = 0.0;
            for (std::size_t t = 0; t < 3; ++t) s += tau[t] * oracles::brute_risk(object, loss, q, t);
            return s;
        };
        double bayes = weighted(bayes_strategy(object, loss, tau));
        for (int k = 0; k < 100; ++k) EXPECT_LE(bayes, weighted(random_strategy(rng, 3, 3)) + 1e-9);
        EXPECT_NEAR(bayes, oracles::brute_force_weighted_minimum(object, loss, tau.values()), 1e-12);
    }
}

TEST(Bayes, ZeroOneFastPathAgreesWithGeneralRule) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 200; ++trial) {
        auto object = random_object(rng, 4, 3, 3);
        WeightFunction tau(random_simplex_point(rng, 3));
        EXPECT_EQ(bayes_strategy_zero_one(object, tau), bayes_strategy(object, LossMatrix::zero_one(3), tau));
    }
}

TEST(Bayes, InvariantUnderPositiveRescaling) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        auto object = random_object(rng, 4, 3, 3);
        ExpectedLoss table(object, LossMatrix::zero_one(3));
        auto tau = random_simplex_point(rng, 3);
        auto scaled = tau;
        for (double& v : scaled) v *= 37.5;
        EXPECT_EQ(table.bayes_decisions(tau), table.bayes_decisions(scaled));
    }
}

TEST(Bayes, TiesBreakToLowestState) {
    auto object = uniform_2x2x1();
    EXPECT_EQ(bayes_strategy(object, LossMatrix::zero_one(2), WeightFunction::uniform(1)), Strategy::constant(2, 2, 0));
}

TEST(Regret, OptimalStrategyHasZeroRegret) {
    std::mt19937_64 rng(12);
    auto object = random_object(rng, 3, 3, 3);
    auto loss = LossMatrix::zero_one(3);
    for (std::size_t t = 0; t < 3; ++t)
        EXPECT_NEAR(regret(object, loss, optimal_strategy(object, loss, ModelIndex{t}), ModelIndex{t}), 0.0, 1e-15);
}

TEST(Regret, EqualsBruteRiskMinusBruteOptimum) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        auto object = random_object(rng, 3, 2, 2);
        auto loss = LossMatrix::zero_one(2);
        auto q = random_strategy(rng, 3, 2);
        for (std::size_t t = 0; t < 2; ++t) {
            double expected =
                oracles::brute_risk(object, loss, q, t) - oracles::brute_force_optimal_risk(object, loss, t);
            double r = regret(object, loss, q, ModelIndex{t});
            EXPECT_NEAR(r, expected, 1e-12);
            EXPECT_GE(r, -1e-9);
        }
    }
}

TEST(Predominates, StrategyDoesNotPredominateItself) {
    std::mt19937_64 rng(14);
    auto object = random_object(rng, 3, 2, 2);
    auto q = random_strategy(rng, 3, 2);
    EXPECT_FALSE(predominates(object, LossMatrix::zero_one(2), q, q));
}

TEST(Predominates, SingleModelOptimalBeatsWorseStrategy) {
    std::mt19937_64 rng(15);
    auto object = random_object(rng, 3, 2, 1);
    auto loss = LossMatrix::zero_one(2);
    auto best = optimal_strategy(object, loss, ModelIndex{0});
    auto worse = Strategy::deterministic(
        [&] {
            auto d = best.decisions();
            d[0] = 1 - d[0];
            return d;
        }(),
        2);
    ASSERT_GT(risk(object, loss, worse, ModelIndex{0}), risk(object, loss, best, ModelIndex{0}));
    EXPECT_TRUE(predominates(object, loss, best, worse));
    EXPECT_FALSE(predominates(object, loss, worse, best));
}

TEST(Predominates, NothingPredominatesBayesStrategies) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 300; ++trial) {
        auto object = random_object(rng, 3, 3, 3);
        auto loss = LossMatrix::zero_one(3);
        WeightFunction tau(random_simplex_point(rng, 3));
        EXPECT_FALSE(oracles::domination_search(object, loss, bayes_strategy(object, loss, tau)).has_value());
    }
}

TEST(MaxLikelihood, PicksJointArgmax) {
    // x=0: max over (y,θ) is p(0,1;1)=0.4 → y=1; x=1: p(1,0;0)=0.5 → y=0
    FiniteComplexObject object(2, 2, 2, {0.3, 0.1, 0.1, 0.4, 0.5, 0.2, 0.1, 0.3});
    EXPECT_EQ(max_likelihood_strategy(object).decisions(), (Decisions{1, 0}));
}
