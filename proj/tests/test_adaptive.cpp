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

// Conditional states, strategy trees and the exact adaptive optimum.

#include <gtest/gtest.h>

#include <random>

#include "detpower/io.hpp"
#include "test_support.hpp"

namespace detpower {
namespace {

using testing::basis_pair;
using testing::diag_povm;
using testing::rho0;
using testing::rho1;

AdaptiveStrategy load_fixture(const std::string &name) {
    return io::strategy_from_json(io::parse_json(io::read_file(testing::data_path(name))), 2);
}

/// Leaf probabilities of both hypotheses computed path by path from the
/// strategy's choices, with no shared recursion.
std::pair<std::vector<double>, std::vector<double>> path_probabilities(const std::vector<std::vector<double>> &single,
                                                                       const AdaptiveStrategy &s) {
    const std::size_t m = s.outcomes();
    std::vector<double> h0(s.leaves()), h1(s.leaves());
    for (std::size_t leaf = 0; leaf < s.leaves(); leaf++) {
        std::vector<std::size_t> seq(s.depth());
        for (std::size_t i = s.depth(), v = leaf; i-- > 0; v /= m) {
            seq[i] = v % m;
        }
        double a = 1, b = 1;
        for (std::size_t step = 0; step < s.depth(); step++) {
            auto c = s.choice(std::span<const std::size_t>(seq.data(), step)).value();
            a *= single[c.rho][seq[step]];
            b *= single[c.sigma][seq[step]];
        }
        h0[leaf] = a;
        h1[leaf] = b;
    }
    return {h0, h1};
}

double naive_ml(const std::vector<double> &p, const std::vector<double> &q) {
    double s = 0;
    for (std::size_t k = 0; k < p.size(); k++) {
        s += std::min(p[k], q[k]);
    }
    return s / 2;
}

/// Minimum over every assignment of candidate pairs to the internal nodes.
double enumerate_trees(const Povm &p, const std::vector<DensityMatrix> &cands, std::size_t n) {
    std::vector<std::vector<double>> single;
    for (const auto &c : cands) {
        auto d = induced_distribution(p, c);
        single.emplace_back(d.probs().begin(), d.probs().end());
    }
    AdaptiveStrategy s(n, p.size());
    std::vector<std::pair<std::size_t, std::size_t>> nodes;
    for (std::size_t step = 0; step < n; step++) {
        for (std::size_t i = 0; i < s.level_size(step); i++) {
            nodes.emplace_back(step, i);
        }
    }
    const std::size_t pairs = cands.size() * cands.size();
    std::size_t total = 1;
    for (std::size_t i = 0; i < nodes.size(); i++) {
        total *= pairs;
    }
    double best = 1;
    for (std::size_t code = 0; code < total; code++) {
        std::size_t v = code;
        for (auto [step, i] : nodes) {
            std::size_t pc = v % pairs;
            v /= pairs;
            s.set_at(step, i, ChoicePair{pc / cands.size(), pc % cands.size()});
        }
        auto [h0, h1] = path_probabilities(single, s);
        best = std::min(best, naive_ml(h0, h1));
    }
    return best;
}

DensityMatrix random_joint(std::size_t dim, std::mt19937_64 &rng) { return testing::random_density(dim, rng); }

TEST(ConditionalState, ProductExample) {
    auto joint = JointState::product(ProductInput({rho0(), rho0(), rho1()}));
    std::vector<std::size_t> hist{0, 0};
    auto c = conditional_state(joint, diag_povm(), hist);
    ASSERT_TRUE(c.state);
    EXPECT_NEAR(c.weight, 0.16, 1e-15);
    EXPECT_LE(max_abs_diff(c.state->matrix(), ComplexMatrix::diagonal({0, 1})), 1e-15);
    auto op = conditional_operator(joint, diag_povm(), hist);
    EXPECT_LE(max_abs_diff(op, ComplexMatrix::diagonal({0, 0.16})), 1e-15);
}

TEST(ConditionalState, EmptyHistoryIsMarginal) {
    std::mt19937_64 rng(41);
    auto a = testing::random_density(2, rng);
    auto b = testing::random_density(2, rng);
    auto joint = JointState::product(ProductInput({a, b}));
    auto c = conditional_state(joint, diag_povm(), {});
    EXPECT_NEAR(c.weight, 1.0, 1e-14);
    EXPECT_LE(max_abs_diff(c.state->matrix(), a.matrix()), 1e-14);
}

TEST(ConditionalState, ZeroWeightHistory) {
    auto proj = Povm::diagonal({{1, 0}, {0, 1}});
    auto joint = JointState::product(ProductInput({rho0(), rho1()}));
    std::vector<std::size_t> hist{1};
    auto c = conditional_state(joint, proj, hist);
    EXPECT_FALSE(c.state);
    EXPECT_EQ(c.weight, 0.0);
}

TEST(ConditionalState, EntangledBellPair) {
    // For (|00> + |11>)/sqrt(2) a projective "0" on slot 1 leaves slot 2 in |0>.
    std::vector<Complex> psi{1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0)};
    JointState joint(DensityMatrix::pure(psi), 2, 2);
    auto proj = Povm::diagonal({{1, 0}, {0, 1}});
    std::vector<std::size_t> hist{0};
    auto c = conditional_state(joint, proj, hist);
    EXPECT_NEAR(c.weight, 0.5, 1e-15);
    EXPECT_LE(max_abs_diff(c.state->matrix(), rho0().matrix()), 1e-15);
}

TEST(ConditionalState, Errors) {
    auto joint = JointState::product(ProductInput({rho0(), rho1()}));
    std::vector<std::size_t> too_long{0, 0};
    EXPECT_THROW(conditional_operator(joint, diag_povm(), too_long), DomainError);
    EXPECT_THROW(JointState(DensityMatrix::maximally_mixed(3), 2, 2), StructuralError);
    std::mt19937_64 rng(42);
    EXPECT_THROW(conditional_operator(joint, testing::random_povm(3, 2, rng), {}), StructuralError);
}

TEST(ProtocolDistribution, MatchesJointDistribution) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 10; t++) {
        auto p = testing::random_povm(2, 2 + t % 3, rng);
        // Generic (entangled) three-qubit states.
        JointState joint(random_joint(8, rng), 2, 3);
        auto a = joint_sequence_distribution(joint, p);
        auto b = induced_protocol_distribution(joint, p);
        double total = 0;
        for (std::size_t i = 0; i < a.size(); i++) {
            EXPECT_NEAR(a.probs[i], b.probs[i], 1e-12);
            total += b.probs[i];
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(ProtocolDistribution, ProductMatchesSequenceDistribution) {
    std::mt19937_64 rng(44);
    auto p = testing::random_povm(3, 3, rng);
    ProductInput in({testing::random_density(3, rng), testing::random_density(3, rng)});
    auto a = induced_protocol_distribution(JointState::product(in), p);
    auto b = sequence_distribution(p, in);
    for (std::size_t i = 0; i < a.size(); i++) {
        EXPECT_NEAR(a.probs[i], b.probs[i], 1e-13);
    }
}

TEST(Strategy, Indexing) {
    AdaptiveStrategy s(3, 2);
    EXPECT_EQ(s.leaves(), 8u);
    EXPECT_EQ(s.level_size(0), 1u);
    EXPECT_EQ(s.level_size(2), 4u);
    std::vector<std::size_t> h{1, 0};
    s.set(h, {1, 0});
    EXPECT_EQ(s.choice_at(2, 2), (ChoicePair{1, 0}));
    EXPECT_FALSE(s.choice_at(2, 1));
    std::vector<std::size_t> leaf{0, 0, 0};
    EXPECT_THROW(s.node(leaf), DomainError);
    EXPECT_THROW(s.set_grouping(GroupingMask{std::vector<bool>(4)}), StructuralError);
    EXPECT_THROW(AdaptiveStrategy(0, 2), StructuralError);
}

TEST(Strategy, FixtureValue) {
    auto s = load_fixture("adaptive_strategy_n3.json");
    auto cands = basis_pair();
    auto e = evaluate_strategy(diag_povm(), cands, s);
    EXPECT_NEAR(e.p_err, 0.336, 1e-12);
    // The fixture's grouping is the ML grouping of its own tree.
    s.clear_grouping();
    EXPECT_NEAR(evaluate_strategy(diag_povm(), cands, s).p_err, 0.336, 1e-12);
}

TEST(Strategy, LiteralSwapRuleValue) {
    // Keep (rho0, rho1) only after outcomes (1, 1), swap after anything else,
    // and accept on {111, 112, 221, 122, 212}.
    auto s = load_fixture("adaptive_strategy_n3.json");
    std::vector<std::size_t> h22{1, 1};
    s.set(h22, {1, 0});
    EXPECT_NEAR(evaluate_strategy(diag_povm(), basis_pair(), s).p_err, 0.436, 1e-12);
}

TEST(Strategy, ProductSpecialCases) {
    auto cands = basis_pair();
    auto iid = AdaptiveStrategy::constant(3, 2, {0, 1});
    EXPECT_NEAR(evaluate_strategy(diag_povm(), cands, iid).p_err, 0.352, 1e-12);
    std::vector<std::size_t> rp{0, 0, 1}, sp{1, 1, 0};
    auto pat = AdaptiveStrategy::from_patterns(2, rp, sp);
    EXPECT_NEAR(evaluate_strategy(diag_povm(), cands, pat).p_err, 0.344, 1e-12);
}

TEST(Strategy, EvaluationMatchesPathOracle) {
    std::mt19937_64 rng(45);
    auto p = testing::random_povm(2, 3, rng);
    std::vector<DensityMatrix> cands{testing::random_density(2, rng), testing::random_density(2, rng),
                                     testing::random_density(2, rng)};
    std::vector<std::vector<double>> single;
    for (const auto &c : cands) {
        auto d = induced_distribution(p, c);
        single.emplace_back(d.probs().begin(), d.probs().end());
    }
    std::uniform_int_distribution<std::size_t> pick(0, 2);
    for (int t = 0; t < 20; t++) {
        AdaptiveStrategy s(3, 3);
        for (std::size_t step = 0; step < 3; step++) {
            for (std::size_t i = 0; i < s.level_size(step); i++) {
                s.set_at(step, i, {pick(rng), pick(rng)});
            }
        }
        auto e = evaluate_strategy(p, cands, s);
        auto [h0, h1] = path_probabilities(single, s);
        double t0 = 0, t1 = 0;
        for (std::size_t i = 0; i < h0.size(); i++) {
            EXPECT_NEAR(e.h0.probs[i], h0[i], 1e-15);
            EXPECT_NEAR(e.h1.probs[i], h1[i], 1e-15);
            t0 += e.h0.probs[i];
            t1 += e.h1.probs[i];
        }
        EXPECT_NEAR(t0, 1.0, 1e-12);
        EXPECT_NEAR(t1, 1.0, 1e-12);
        EXPECT_NEAR(e.p_err, naive_ml(h0, h1), 1e-14);
    }
}

TEST(Strategy, IncompleteTreeRejected) {
    auto s = load_fixture("incomplete_strategy_n3.json");
    try {
        evaluate_strategy(diag_povm(), basis_pair(), s);
        FAIL() << "expected StructuralError";
    } catch (const StructuralError &e) {
        EXPECT_NE(std::string(e.what()).find("\"22\""), std::string::npos) << e.what();
    }
}

TEST(Strategy, UnreachableNodesMayBeEmpty) {
    // With a projective detector and basis candidates, outcome 2 never occurs
    // under either hypothesis when both prepare |0>.
    auto proj = Povm::diagonal({{1, 0}, {0, 1}});
    AdaptiveStrategy s(2, 2);
    s.set(std::vector<std::size_t>{}, {0, 0});
    s.set(std::vector<std::size_t>{0}, {0, 1});
    EXPECT_NEAR(evaluate_strategy(proj, basis_pair(), s).p_err, 0.0, 1e-15);
}

TEST(Strategy, CandidateAndOutcomeChecks) {
    auto s = AdaptiveStrategy::constant(2, 2, {0, 2});
    EXPECT_THROW(evaluate_strategy(diag_povm(), basis_pair(), s), DomainError);
    auto t = AdaptiveStrategy::constant(2, 3, {0, 1});
    EXPECT_THROW(evaluate_strategy(diag_povm(), basis_pair(), t), StructuralError);
}

TEST(OptimalAdaptive, DiagonalExample) {
    auto cands = basis_pair();
    auto r = optimal_adaptive(diag_povm(), cands, 3);
    EXPECT_NEAR(r.p_err, 0.336, 1e-12);
    EXPECT_LE(r.p_err, best_product_pair(diag_povm(), 3, cands).p_err + 1e-15);
    EXPECT_NEAR(evaluate_strategy(diag_povm(), cands, r.strategy).p_err, r.p_err, 1e-15);
}

TEST(OptimalAdaptive, BaseCases) {
    auto cands = basis_pair();
    EXPECT_NEAR(optimal_adaptive(diag_povm(), cands, 1).p_err, 0.4, 1e-15);
    auto useless = Povm::diagonal({{0.5, 0.5}, {0.5, 0.5}});
    EXPECT_NEAR(optimal_adaptive(useless, cands, 3).p_err, 0.5, 1e-15);
}

TEST(OptimalAdaptive, MatchesTreeEnumeration) {
    std::mt19937_64 rng(46);
    for (int t = 0; t < 4; t++) {
        auto p = testing::random_povm(2, 2, rng);
        std::vector<DensityMatrix> cands{testing::random_density(2, rng), testing::random_density(2, rng)};
        for (std::size_t n : {1, 2, 3}) {
            EXPECT_NEAR(optimal_adaptive(p, cands, n).p_err, enumerate_trees(p, cands, n), 1e-14);
        }
    }
    EXPECT_NEAR(optimal_adaptive(diag_povm(), basis_pair(), 3).p_err, enumerate_trees(diag_povm(), basis_pair(), 3),
                1e-14);
}

TEST(OptimalAdaptive, NeverWorseThanProducts) {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 5; t++) {
        auto p = testing::random_povm(2, 3, rng);
        std::vector<DensityMatrix> cands{testing::random_density(2, rng), testing::random_density(2, rng)};
        for (std::size_t n = 1; n <= 4; n++) {
            EXPECT_LE(optimal_adaptive(p, cands, n).p_err, best_product_pair(p, n, cands).p_err + 1e-14);
        }
    }
}

TEST(OptimalAdaptive, NonIncreasingInN) {
    auto cands = basis_pair();
    double prev = 0.5;
    for (std::size_t n = 1; n <= 8; n++) {
        double e = optimal_adaptive(diag_povm(), cands, n).p_err;
        EXPECT_LE(e, prev + 1e-15);
        prev = e;
    }
}

TEST(OptimalAdaptive, WorkCap) {
    auto cands = basis_pair();
    try {
        optimal_adaptive(diag_povm(), cands, 13);
        FAIL() << "expected ResourceError";
    } catch (const ResourceError &e) {
        EXPECT_EQ(e.cap, "adaptive_cap");
    }
    EXPECT_THROW(optimal_adaptive(diag_povm(), cands, 0), DomainError);
}

}  // namespace
}  // namespace detpower
