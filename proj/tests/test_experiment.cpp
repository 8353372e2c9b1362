#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cor/experiment.hpp"

using namespace cor;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("cor_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST(ExperimentConfig, Validation) {
    ExperimentConfig c;
    c.example = 99;
    try {
        validate(c);
        FAIL();
    } catch (const ConfigurationError& e) {
        EXPECT_NE(std::string(e.what()).find("unknown example"), std::string::npos);
    }
    c = {};
    c.epsilon = 0.0;
    EXPECT_THROW(validate(c), ConfigurationError);
    c = {};
    c.procedures = {Procedure::robbins};
    EXPECT_THROW(validate(c), ConfigurationError);
    EXPECT_THROW(parse_procedure("bogus"), ConfigurationError);
    EXPECT_THROW(parse_schedule("bogus"), ConfigurationError);
}

TEST(ExperimentConfig, JsonMirrorsFlags) {
    auto c = config_from_json(nlohmann::json::parse(
        R"({"example": 4, "n": [1, 2], "procedures": ["ml", "minimax"], "epsilon": 0.02,
            "grid_step": 0.05, "theta_step": 0.4, "cells": 8, "schedule": "harmonic", "max_iter": 50, "out": "x"})"));
    EXPECT_EQ(c.example, 4);
    EXPECT_EQ(c.sample_sizes, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(c.procedures, (std::vector<Procedure>{Procedure::ml, Procedure::minimax}));
    EXPECT_EQ(c.epsilon, 0.02);
    EXPECT_EQ(*c.grid_step, 0.05);
    EXPECT_EQ(*c.theta_step, 0.4);
    EXPECT_EQ(c.quantizer_cells, 8u);
    EXPECT_EQ(c.schedule.kind, StepSchedule::Kind::harmonic);
    EXPECT_EQ(c.max_iterations, 50u);
    EXPECT_EQ(c.out, "x");
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"n": "one"})")), ConfigurationError);
}

TEST(ExperimentConfig, HashIgnoresOutputDirectoryOnly) {
    ExperimentConfig a;
    ExperimentConfig b;
    b.out = "elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.epsilon = 0.02;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Experiment, MinimaxWithoutLearningPeaksNearPointOneSix) {
    ExperimentConfig c;
    c.example = 1;
    c.sample_sizes = {0};
    c.procedures = {Procedure::minimax};
    auto report = run_experiment(c, false);
    ASSERT_EQ(report.runs.size(), 1u);
    const auto& curve = report.runs[0].curve;
    auto peak = std::max_element(curve.begin(), curve.end(),
                                 [](const auto& a, const auto& b) { return a.risk < b.risk; });
    EXPECT_NEAR(peak->risk, 0.16, 0.005);
    EXPECT_NEAR(curve[10].theta, 0.5, 1e-12);
    EXPECT_NEAR(curve[10].risk, peak->risk, 0.005);
}

TEST(Experiment, EstimateProceduresSkipEmptySamples) {
    ExperimentConfig c;
    c.example = 1;
    c.sample_sizes = {0, 1};
    c.procedures = {Procedure::closest_to_optimal, Procedure::ml};
    auto report = run_experiment(c, false);
    EXPECT_EQ(report.skipped, std::vector<std::string>{"ml_n0"});
    EXPECT_NE(report.find(Procedure::closest_to_optimal, 0), nullptr);
    EXPECT_EQ(report.find(Procedure::ml, 0), nullptr);
    EXPECT_NE(report.find(Procedure::ml, 1), nullptr);
}

TEST(Experiment, Example4ClosestToOptimalHasSmallestMaxRegret) {
    ExperimentConfig c;
    c.example = 4;
    c.sample_sizes = {1};
    c.procedures = {Procedure::closest_to_optimal, Procedure::ml, Procedure::consistent};
    auto report = run_experiment(c, false);
    const double g0 = report.find(Procedure::closest_to_optimal, 1)->max_regret;
    EXPECT_LE(g0, report.find(Procedure::ml, 1)->max_regret);
    EXPECT_LE(g0, report.find(Procedure::consistent, 1)->max_regret);
}

TEST(Experiment, OutputsAreByteIdenticalAndWellFormed) {
    ExperimentConfig c;
    c.example = 2;
    c.sample_sizes = {0, 1, 2};
    c.procedures = {Procedure::closest_to_optimal, Procedure::robbins, Procedure::ml};
    c.out = scratch("a").string();
    auto first = run_experiment(c);
    c.out = scratch("b").string();
    auto second = run_experiment(c);
    ASSERT_EQ(first.files.size(), second.files.size());
    for (std::size_t i = 0; i < first.files.size(); ++i) {
        EXPECT_EQ(first.files[i].filename(), second.files[i].filename());
        auto text = slurp(first.files[i]);
        EXPECT_EQ(text, slurp(second.files[i])) << first.files[i];
        EXPECT_EQ(text.find('\r'), std::string::npos);
        EXPECT_EQ(text.rfind("# cor 0.1.0 config_hash=" + first.config_hash, 0), 0u) << first.files[i];
    }
    auto curve = slurp(std::filesystem::path(c.out) / "curve_robbins_n1.csv");
    std::istringstream lines(curve);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    EXPECT_EQ(line, "theta,risk,optimal_risk,regret,status");
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        std::istringstream cells(line);
        std::string cell;
        for (int k = 0; k < 4; ++k) std::getline(cells, cell, ',');
        EXPECT_GE(std::stod(cell), -1e-9);
    }
    EXPECT_EQ(rows, 21u);
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.out) / "plot.gp"));
    EXPECT_TRUE(std::filesystem::exists(std::filesystem::path(c.out) / "trace_closest-to-optimal_n1.csv"));
    EXPECT_FALSE(std::filesystem::exists(std::filesystem::path(c.out) / "trace_ml_n1.csv"));
}

TEST(Experiment, UnconvergedRunsAreFlagged) {
    ExperimentConfig c;
    c.example = 1;
    c.sample_sizes = {1};
    c.procedures = {Procedure::closest_to_optimal};
    c.epsilon = 1e-9;
    c.max_iterations = 5;
    auto report = run_experiment(c, false);
    EXPECT_FALSE(report.all_converged());
    EXPECT_EQ(report.runs[0].status, "unconverged");
}

TEST(Experiment, BudgetErrorsPropagate) {
    ExperimentConfig c;
    c.example = 4;
    c.sample_sizes = {12};
    c.procedures = {Procedure::ml};
    c.quantizer_cells = 64;
    EXPECT_THROW(run_experiment(c, false), BudgetError);
}
