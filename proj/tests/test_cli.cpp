// Copyright 2026 The detpower Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The command-line front end, driven in process.

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"

namespace detpower {
namespace {

using testing::data_path;

struct Outcome {
    int code;
    std::string out;
    std::string err;

    io::Json json() const { return io::Json::parse(out); }
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "detpower");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

double value_of(const io::Json &report, const std::string &name) {
    return report.at("results").at(name).at("value").get<double>();
}

TEST(Digest, KnownVector) {
    EXPECT_EQ(cli::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Validate, ValidFile) {
    auto r = run_cli({"validate", data_path("diag_povm.json")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    auto j = r.json();
    EXPECT_EQ(j.at("command"), "validate");
    EXPECT_TRUE(j.at("results").at("valid").get<bool>());
    EXPECT_EQ(j.at("inputs_digest").get<std::string>().size(), 64u);
}

TEST(Validate, IncompleteFile) {
    auto r = run_cli({"validate", data_path("incomplete_povm.json")});
    EXPECT_EQ(r.code, cli::kInvalid);
    auto j = r.json();
    EXPECT_FALSE(j.at("results").at("valid").get<bool>());
    EXPECT_NEAR(value_of(j, "completeness_residual"), 0.1, 1e-12);
}

TEST(Validate, MalformedAndMissing) {
    EXPECT_EQ(run_cli({"validate", data_path("malformed.json")}).code, cli::kParse);
    EXPECT_EQ(run_cli({"validate", data_path("no_such_file.json")}).code, cli::kParse);
}

TEST(Usage, Errors) {
    EXPECT_EQ(run_cli({}).code, cli::kUsage);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kUsage);
    EXPECT_EQ(run_cli({"exponent", data_path("diag_povm.json"), "--kind", "fisher"}).code, cli::kUsage);
    auto r = run_cli({"exponent", data_path("diag_povm.json"), "--kind", "hoeffding"});
    EXPECT_EQ(r.code, cli::kUsage);
    EXPECT_NE(r.err.find("--rate"), std::string::npos);
    EXPECT_EQ(run_cli({"exponent", data_path("diag_povm.json"), "--kind", "stein", "--rate", "0.1"}).code,
              cli::kUsage);
    EXPECT_EQ(run_cli({"exponent", data_path("diag_povm.json"), "--restarts", "-3"}).code, cli::kUsage);
}

TEST(Exponent, Chernoff) {
    auto r = run_cli({"exponent", data_path("diag_povm.json"), "--restarts", "4"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    auto j = r.json();
    EXPECT_NEAR(value_of(j, "zeta_chernoff"), 0.0246661313, 1e-9);
    EXPECT_EQ(j.at("results").at("zeta_chernoff").at("units"), "nats");
    EXPECT_NEAR(value_of(j, "s_star"), 0.5168, 1e-3);
    EXPECT_EQ(j.at("diagnostics").at("restarts_used"), 4);
    EXPECT_EQ(j.at("parameters").at("kind"), "chernoff");
}

TEST(Exponent, Bits) {
    auto nats = run_cli({"exponent", data_path("stern_gerlach_062.json"), "--restarts", "2"}).json();
    auto bits = run_cli({"exponent", data_path("stern_gerlach_062.json"), "--restarts", "2", "--bits"}).json();
    EXPECT_EQ(bits.at("results").at("zeta_chernoff").at("units"), "bits");
    EXPECT_NEAR(value_of(bits, "zeta_chernoff"), value_of(nats, "zeta_chernoff") / std::log(2.0), 1e-12);
    EXPECT_NEAR(value_of(nats, "zeta_chernoff"), noisy_sg_zeta(0.62), 1e-6);
    EXPECT_NE(bits.at("inputs_digest"), nats.at("inputs_digest"));
}

TEST(Exponent, SteinAndHoeffding) {
    auto s = run_cli({"exponent", data_path("diag_povm.json"), "--kind", "stein", "--restarts", "2"});
    ASSERT_EQ(s.code, cli::kOk) << s.err;
    EXPECT_NEAR(value_of(s.json(), "zeta_stein"), 0.104649629, 1e-9);
    auto h = run_cli({"exponent", data_path("diag_povm.json"), "--kind", "hoeffding", "--rate", "0", "--restarts", "2"});
    ASSERT_EQ(h.code, cli::kOk) << h.err;
    EXPECT_NEAR(value_of(h.json(), "zeta_hoeffding"), 0.104649629, 1e-6);
}

TEST(Exponent, InfiniteEncodedAsString) {
    // A projective detector is perfectly discriminating.
    std::string path = ::testing::TempDir() + "/projective.json";
    {
        std::ofstream f(path);
        f << R"({"dim": 2, "elements": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]})";
    }
    auto r = run_cli({"exponent", path, "--restarts", "1"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_EQ(r.json().at("results").at("zeta_chernoff").at("value"), "inf");
}

TEST(Exponent, InvalidPovmRejected) {
    EXPECT_EQ(run_cli({"exponent", data_path("incomplete_povm.json")}).code, cli::kInvalid);
}

TEST(Digest, DeterministicAndInputSensitive) {
    auto a = run_cli({"validate", data_path("diag_povm.json")}).json();
    auto b = run_cli({"validate", data_path("diag_povm.json")}).json();
    auto c = run_cli({"validate", data_path("stern_gerlach_062.json")}).json();
    EXPECT_EQ(a.at("inputs_digest"), b.at("inputs_digest"));
    EXPECT_NE(a.at("inputs_digest"), c.at("inputs_digest"));
    auto s1 = run_cli({"exponent", data_path("diag_povm.json"), "--restarts", "2", "--seed", "1"}).json();
    auto s2 = run_cli({"exponent", data_path("diag_povm.json"), "--restarts", "2", "--seed", "2"}).json();
    EXPECT_NE(s1.at("inputs_digest"), s2.at("inputs_digest"));
}

TEST(Finite, MlAndPatterns) {
    auto iid = run_cli({"finite", data_path("diag_povm.json"), "--n", "3", "--candidates",
                        data_path("basis_candidates.json")});
    ASSERT_EQ(iid.code, cli::kOk) << iid.err;
    EXPECT_NEAR(value_of(iid.json(), "p_err"), 0.352, 1e-12);
    EXPECT_EQ(iid.json().at("results").at("accept_h0").size(), 7u);

    auto pat = run_cli({"finite", data_path("diag_povm.json"), "--n", "3", "--candidates",
                        data_path("basis_candidates.json"), "--rho-pattern", "001", "--sigma-pattern", "110"});
    ASSERT_EQ(pat.code, cli::kOk) << pat.err;
    EXPECT_NEAR(value_of(pat.json(), "p_err"), 0.344, 1e-12);

    auto best = run_cli({"finite", data_path("diag_povm.json"), "--n", "3", "--mode", "pattern"});
    ASSERT_EQ(best.code, cli::kOk) << best.err;
    auto j = best.json();
    EXPECT_NEAR(value_of(j, "p_err"), 0.344, 1e-12);
    EXPECT_EQ(j.at("results").at("rho_pattern"), "001");
    EXPECT_EQ(j.at("results").at("sigma_pattern"), "110");
    EXPECT_EQ(j.at("diagnostics").at("optimality"), "exhaustive over candidate patterns");
}

TEST(Finite, PatternSearchLabelledHeuristic) {
    std::string path = ::testing::TempDir() + "/three.json";
    {
        std::ofstream f(path);
        f << R"({"dim": 2, "elements": [[[[0.5,0],[0,0]],[[0,0],[0,0]]], [[[0.25,0],[0.25,0]],[[0.25,0],[0.25,0]]],
                 [[[0.25,0],[-0.25,0]],[[-0.25,0],[0.75,0]]]]})";
    }
    auto r = run_cli({"finite", path, "--n", "2", "--mode", "pattern"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    EXPECT_EQ(r.json().at("diagnostics").at("optimality").get<std::string>().rfind("heuristic", 0), 0u);
}

TEST(Finite, BruteForceAndCap) {
    auto r = run_cli({"finite", data_path("diag_povm.json"), "--n", "4", "--mode", "brute"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    double ml = std::exp(-4 * empirical_rate(testing::diag_povm(), 4));
    EXPECT_NEAR(value_of(r.json(), "p_err"), ml, 1e-12);
    auto cap = run_cli({"finite", data_path("diag_povm.json"), "--n", "25", "--mode", "brute"});
    EXPECT_EQ(cap.code, cli::kCap);
    EXPECT_NE(cap.err.find("brute_force_cap"), std::string::npos);
}

TEST(Finite, BadPatterns) {
    EXPECT_EQ(run_cli({"finite", data_path("diag_povm.json"), "--n", "3", "--rho-pattern", "01"}).code,
              cli::kInvalid);
    EXPECT_EQ(run_cli({"finite", data_path("diag_povm.json"), "--n", "3", "--rho-pattern", "012"}).code,
              cli::kInvalid);
    EXPECT_EQ(run_cli({"finite", data_path("diag_povm.json"), "--n", "3", "--mode", "wild"}).code, cli::kUsage);
}

TEST(Finite, SweepCsv) {
    auto r = run_cli({"finite", data_path("diag_povm.json"), "--n", "3", "--mode", "sweep", "--csv"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "m,x,p_err,log_p_err,rate");
    std::vector<double> errs;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string cell;
        std::vector<std::string> parts;
        while (std::getline(cells, cell, ',')) {
            parts.push_back(cell);
        }
        ASSERT_EQ(parts.size(), 5u);
        errs.push_back(std::stod(parts[2]));
    }
    ASSERT_EQ(errs.size(), 4u);
    EXPECT_NEAR(errs[0], 0.352, 1e-12);
    EXPECT_NEAR(errs[2], 0.344, 1e-12);
}

TEST(Finite, SweepJsonPoints) {
    auto r = run_cli({"finite", data_path("diag_povm.json"), "--n", "400", "--mode", "sweep", "--points", "5"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    auto j = r.json();
    const auto &curve = j.at("results").at("curve").at("value");
    ASSERT_EQ(curve.size(), 5u);
    EXPECT_EQ(curve[0].at("m"), 0);
    EXPECT_EQ(curve[2].at("m"), 200);
    EXPECT_EQ(curve[4].at("m"), 400);
    EXPECT_GT(value_of(j, "min_p_err"), 0);
}

TEST(Finite, SweepNeedsCommutingQubit) {
    std::string path = ::testing::TempDir() + "/three.json";
    {
        std::ofstream f(path);
        f << R"({"dim": 2, "elements": [[[[0.5,0],[0,0]],[[0,0],[0,0]]], [[[0.5,0],[0,0]],[[0,0],[0.5,0]]],
                 [[[0,0],[0,0]],[[0,0],[0.5,0]]]]})";
    }
    EXPECT_EQ(run_cli({"validate", path}).code, cli::kOk);
    EXPECT_EQ(run_cli({"finite", path, "--n", "3", "--mode", "sweep"}).code, cli::kInvalid);
}

TEST(Adaptive, FixtureStrategy) {
    auto r = run_cli({"adaptive", data_path("diag_povm.json"), "--n", "3", "--candidates",
                      data_path("basis_candidates.json"), "--strategy", data_path("adaptive_strategy_n3.json")});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    auto j = r.json();
    EXPECT_NEAR(value_of(j, "p_err"), 0.336, 1e-12);
    EXPECT_EQ(j.at("results").at("grouping"), "explicit");
}

TEST(Adaptive, IncompleteStrategy) {
    auto r = run_cli({"adaptive", data_path("diag_povm.json"), "--n", "3", "--candidates",
                      data_path("basis_candidates.json"), "--strategy", data_path("incomplete_strategy_n3.json")});
    EXPECT_EQ(r.code, cli::kInvalid);
    EXPECT_NE(r.err.find("\"22\""), std::string::npos) << r.err;
}

TEST(Adaptive, DepthMismatch) {
    EXPECT_EQ(run_cli({"adaptive", data_path("diag_povm.json"), "--n", "4", "--candidates",
                       data_path("basis_candidates.json"), "--strategy", data_path("adaptive_strategy_n3.json")})
                  .code,
              cli::kInvalid);
}

TEST(Adaptive, SearchAndCap) {
    auto r = run_cli({"adaptive", data_path("diag_povm.json"), "--n", "3"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    auto j = r.json();
    EXPECT_NEAR(value_of(j, "p_err"), 0.336, 1e-12);
    // Round-trip the reported tree through the evaluator.
    auto strat = io::strategy_from_json(j.at("results").at("strategy"), 2);
    EXPECT_NEAR(evaluate_strategy(testing::diag_povm(), testing::basis_pair(), strat).p_err, 0.336, 1e-12);
    EXPECT_EQ(run_cli({"adaptive", data_path("diag_povm.json"), "--n", "20"}).code, cli::kCap);
}

TEST(Benchmarks, Table) {
    auto r = run_cli({"benchmarks", "--restarts", "2"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    auto j = r.json();
    EXPECT_NEAR(value_of(j, "covariant_numeric_M10000"), std::log(4 / std::numbers::pi), 1e-6);
    EXPECT_NEAR(value_of(j, "noisy_sg_r0.62"), 0.2425789385, 1e-9);
    EXPECT_NEAR(value_of(j, "equivalent_sg_purity_of_covariant"), 0.6189908924, 1e-9);
    EXPECT_NEAR(value_of(j, "commuting_gamma_0.4_0.2"), 0.2933049474, 1e-9);
    EXPECT_NEAR(value_of(j, "finite_n3_iid"), 0.352, 1e-12);
    EXPECT_NEAR(value_of(j, "finite_n3_best_product"), 0.344, 1e-12);
    EXPECT_NEAR(value_of(j, "finite_n3_best_adaptive"), 0.336, 1e-12);
    for (const auto &row : j.at("results").at("noisy_sg_curve").at("value")) {
        EXPECT_NEAR(row.at("analytic").get<double>(), row.at("pipeline").get<double>(), 1e-9);
    }
    for (const auto &row : j.at("results").at("mixing_spot_checks").at("value")) {
        EXPECT_LE(row.at("chernoff_lower").get<double>(), row.at("chernoff_exact").get<double>() + 1e-12);
        EXPECT_GE(row.at("chernoff_upper").get<double>(), row.at("chernoff_exact").get<double>() - 1e-12);
        EXPECT_LE(row.at("stein_lower").get<double>(), row.at("stein_exact").get<double>() + 1e-12);
        EXPECT_GE(row.at("stein_upper").get<double>(), row.at("stein_exact").get<double>() - 1e-12);
    }
}

}  // namespace
}  // namespace detpower
