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

#ifndef DETPOWER_ADAPTIVE_HPP
#define DETPOWER_ADAPTIVE_HPP

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "detpower/finite.hpp"
#include "detpower/optimizer.hpp"
#include "detpower/povm.hpp"
#include "detpower/state.hpp"

namespace detpower {

/// A state of n slots, each of local dimension d.
struct JointState {
    DensityMatrix state;
    std::size_t local_dim;
    std::size_t slots;

    JointState(DensityMatrix s, std::size_t d, std::size_t n) : state(std::move(s)), local_dim(d), slots(n) {
        std::size_t total = 1;
        for (std::size_t i = 0; i < n && total <= state.dim(); i++) {
            total *= d;
        }
        if (d == 0 || n == 0 || total != state.dim()) {
            throw StructuralError("joint state dimension is not local_dim^slots");
        }
    }

    static JointState product(const ProductInput &input) {
        ComplexMatrix m = input.factors.front().matrix();
        for (std::size_t i = 1; i < input.size(); i++) {
            m = kron(m, input.factors[i].matrix());
        }
        return JointState(detail::density_from_matrix(std::move(m)), input.factors.front().dim(), input.size());
    }
};

struct ConditionalState {
    /// Normalized conditional state; empty when the history has zero weight.
    std::optional<DensityMatrix> state;
    /// P(history | joint), the trace of the unnormalized conditional state.
    double weight = 0;
};

/// Unnormalized conditional state for slot s = |history| + 1:
/// tr_{all but s}[(E_{k_1} (x) ... (x) E_{k_{s-1}} (x) I) rho^n].
/// Outcome indices are 0-based. An empty history gives the reduced state of slot 1.
inline ComplexMatrix conditional_operator(const JointState &joint, const Povm &p, std::span<const std::size_t> history) {
    const std::size_t d = joint.local_dim;
    if (p.dim() != d) {
        throw StructuralError("POVM and joint-state local dimensions differ");
    }
    if (history.size() >= joint.slots) {
        throw DomainError("history must be shorter than the number of slots");
    }
    const std::size_t pre = product_dim(d, history.size(), joint.state.dim(), "joint_dim");
    const std::size_t post = joint.state.dim() / (pre * d);

    ComplexMatrix e = ComplexMatrix::identity(1);
    for (auto k : history) {
        if (k >= p.size()) {
            throw DomainError("outcome index out of range");
        }
        e = kron(e, p[k]);
    }

    const auto &rho = joint.state.matrix();
    ComplexMatrix out(d);
    auto index = [&](std::size_t x, std::size_t a, std::size_t z) { return (x * d + a) * post + z; };
    for (std::size_t a = 0; a < d; a++) {
        for (std::size_t b = 0; b < d; b++) {
            Complex acc = 0;
            for (std::size_t x = 0; x < pre; x++) {
                for (std::size_t y = 0; y < pre; y++) {
                    Complex exy = e(x, y);
                    if (exy == Complex(0)) {
                        continue;
                    }
                    for (std::size_t z = 0; z < post; z++) {
                        acc += exy * rho(index(y, a, z), index(x, b, z));
                    }
                }
            }
            out(a, b) = acc;
        }
    }
    return out;
}

/// Normalized conditional_operator and its weight.
inline ConditionalState conditional_state(const JointState &joint, const Povm &p, std::span<const std::size_t> history) {
    auto op = conditional_operator(joint, p, history);
    double w = op.trace().real();
    if (!(w > 1e-15)) {
        return {std::nullopt, std::max(0.0, w)};
    }
    return {detail::density_from_matrix(std::move(op)), w};
}

/// P(k^n | rho^n) = tr(E_{k^n} rho^n), straight from the product operators.
inline SequenceDistribution joint_sequence_distribution(const JointState &joint, const Povm &p) {
    const std::size_t m = p.size();
    const std::size_t count = sequence_count(m, joint.slots, kDefaultSequenceCap, "sequence_cap");
    SequenceDistribution out{m, joint.slots, std::vector<double>(count)};
    for (std::size_t i = 0; i < count; i++) {
        auto seq = out.sequence(i);
        out.probs[i] = std::max(0.0, trace_of_product(sequence_operator(p, seq, joint.state.dim()), joint.state.matrix()).real());
    }
    return out;
}

/// The same distribution produced step by step, slot s measured on the
/// unnormalized conditional state of its history.
inline SequenceDistribution induced_protocol_distribution(const JointState &joint, const Povm &p) {
    const std::size_t m = p.size();
    const std::size_t count = sequence_count(m, joint.slots, kDefaultSequenceCap, "sequence_cap");
    SequenceDistribution out{m, joint.slots, std::vector<double>(count)};
    for (std::size_t i = 0; i < count; i++) {
        auto seq = out.sequence(i);
        std::span<const std::size_t> hist(seq.data(), seq.size() - 1);
        auto op = conditional_operator(joint, p, hist);
        out.probs[i] = std::max(0.0, trace_of_product(p[seq.back()], op).real());
    }
    return out;
}

/// Indices into a candidate list for the (H0, H1) preparations at one step.
struct ChoicePair {
    std::size_t rho = 0;
    std::size_t sigma = 0;

    friend bool operator==(const ChoicePair &, const ChoicePair &) = default;
};

/// Feedback strategy of depth n over m outcomes: one ChoicePair for every
/// history of length 0..n-1, and optionally an explicit final grouping over
/// the m^n full histories (otherwise the ML rule decides).
class AdaptiveStrategy {
   public:
    AdaptiveStrategy(std::size_t depth, std::size_t outcomes) : depth_(depth), outcomes_(outcomes) {
        if (depth == 0 || outcomes < 2) {
            throw StructuralError("strategy needs depth >= 1 and at least 2 outcomes");
        }
        std::size_t total = 0;
        std::size_t level = 1;
        for (std::size_t s = 0; s < depth; s++) {
            offsets_.push_back(total);
            total += level;
            level = sequence_count(outcomes, s + 1, kDefaultSequenceCap, "sequence_cap");
        }
        leaves_ = level;
        choices_.resize(total);
    }

    /// Same choice at every node: a non-adaptive product protocol.
    static AdaptiveStrategy constant(std::size_t depth, std::size_t outcomes, ChoicePair c) {
        AdaptiveStrategy s(depth, outcomes);
        for (auto &slot : s.choices_) {
            slot = c;
        }
        return s;
    }

    /// Choice depends only on the step: step i uses patterns[i].
    static AdaptiveStrategy from_patterns(std::size_t outcomes, std::span<const std::size_t> rho_pattern,
                                          std::span<const std::size_t> sigma_pattern) {
        if (rho_pattern.size() != sigma_pattern.size()) {
            throw StructuralError("patterns have different lengths");
        }
        AdaptiveStrategy s(rho_pattern.size(), outcomes);
        for (std::size_t step = 0; step < s.depth_; step++) {
            for (std::size_t node = 0; node < s.level_size(step); node++) {
                s.choices_[s.offsets_[step] + node] = ChoicePair{rho_pattern[step], sigma_pattern[step]};
            }
        }
        return s;
    }

    std::size_t depth() const { return depth_; }
    std::size_t outcomes() const { return outcomes_; }
    std::size_t leaves() const { return leaves_; }
    std::size_t level_size(std::size_t step) const {
        return (step + 1 < depth_ ? offsets_[step + 1] : choices_.size()) - offsets_[step];
    }

    /// Node of a history (0-based outcomes), histories of equal length ordered with k_1 most significant.
    std::size_t node(std::span<const std::size_t> history) const {
        if (history.size() >= depth_) {
            throw DomainError("history is not an internal node");
        }
        std::size_t v = 0;
        for (auto k : history) {
            if (k >= outcomes_) {
                throw DomainError("outcome index out of range");
            }
            v = v * outcomes_ + k;
        }
        return offsets_[history.size()] + v;
    }

    void set(std::span<const std::size_t> history, ChoicePair c) { choices_[node(history)] = c; }
    const std::optional<ChoicePair> &choice(std::span<const std::size_t> history) const {
        return choices_[node(history)];
    }
    const std::optional<ChoicePair> &choice_at(std::size_t step, std::size_t index) const {
        return choices_[offsets_[step] + index];
    }
    void set_at(std::size_t step, std::size_t index, ChoicePair c) { choices_[offsets_[step] + index] = c; }

    const std::optional<GroupingMask> &grouping() const { return grouping_; }
    void set_grouping(GroupingMask g) {
        if (g.accept.size() != leaves_) {
            throw StructuralError("grouping must cover all m^n histories");
        }
        grouping_ = std::move(g);
    }
    void clear_grouping() { grouping_.reset(); }

    friend bool operator==(const AdaptiveStrategy &, const AdaptiveStrategy &) = default;

   private:
    std::size_t depth_;
    std::size_t outcomes_;
    std::size_t leaves_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<std::optional<ChoicePair>> choices_;
    std::optional<GroupingMask> grouping_;
};

struct StrategyEvaluation {
    double p_err = 0.5;
    SequenceDistribution h0;
    SequenceDistribution h1;
    GroupingMask grouping;
};

/// Forward recursion of both hypotheses over all histories, then the explicit
/// grouping if the strategy has one, else the ML rule. A missing choice at a
/// history reachable under either hypothesis is a StructuralError; missing
/// choices elsewhere are read as the first candidate pair.
inline StrategyEvaluation evaluate_strategy(const Povm &p, std::span<const DensityMatrix> candidates,
                                            const AdaptiveStrategy &strat) {
    if (strat.outcomes() != p.size()) {
        throw StructuralError("strategy and POVM outcome counts differ");
    }
    std::vector<std::vector<double>> single;
    for (const auto &c : candidates) {
        if (c.dim() != p.dim()) {
            throw StructuralError("candidate and POVM dimensions differ");
        }
        single.push_back(outcome_probabilities(p, c.matrix()));
    }
    const std::size_t m = p.size();
    std::vector<double> w0{1.0};
    std::vector<double> w1{1.0};
    for (std::size_t step = 0; step < strat.depth(); step++) {
        std::vector<double> n0(w0.size() * m);
        std::vector<double> n1(w1.size() * m);
        for (std::size_t i = 0; i < w0.size(); i++) {
            const auto &c = strat.choice_at(step, i);
            if (!c && (w0[i] > 0 || w1[i] > 0)) {
                std::vector<std::size_t> hist(step);
                for (std::size_t s = step, v = i; s-- > 0; v /= m) {
                    hist[s] = v % m;
                }
                throw StructuralError("incomplete strategy: no choice for history \"" + sequence_label(hist) + "\"");
            }
            ChoicePair cp = c.value_or(ChoicePair{});
            if (cp.rho >= candidates.size() || cp.sigma >= candidates.size()) {
                throw DomainError("strategy refers to a missing candidate");
            }
            for (std::size_t k = 0; k < m; k++) {
                n0[i * m + k] = w0[i] * single[cp.rho][k];
                n1[i * m + k] = w1[i] * single[cp.sigma][k];
            }
        }
        w0 = std::move(n0);
        w1 = std::move(n1);
    }
    SequenceDistribution h0{m, strat.depth(), std::move(w0)};
    SequenceDistribution h1{m, strat.depth(), std::move(w1)};
    if (strat.grouping()) {
        double e = grouping_error(h0, h1, *strat.grouping());
        return {e, std::move(h0), std::move(h1), *strat.grouping()};
    }
    auto ml = ml_error_probability(h0, h1);
    return {ml.p_err, std::move(h0), std::move(h1), std::move(ml.grouping)};
}

/// Work bound for optimal_adaptive: (|C|^2 m)^n subtree evaluations.
inline constexpr std::size_t kDefaultAdaptiveWorkCap = std::size_t{1} << 24;

struct AdaptiveResult {
    double p_err = 0.5;
    AdaptiveStrategy strategy;
};

namespace detail {

struct AdaptiveSearch {
    const std::vector<std::vector<double>> &single;
    std::size_t m;
    std::size_t depth;
    std::size_t c;

    /// Sum over leaves below (step, index) of min(w0, w1); writes argmin choices when `out` is set.
    double solve(std::size_t step, std::size_t index, double w0, double w1, AdaptiveStrategy *out) const {
        if (step == depth) {
            return std::min(w0, w1);
        }
        double best = std::numeric_limits<double>::infinity();
        ChoicePair arg{};
        for (std::size_t r = 0; r < c; r++) {
            for (std::size_t s = 0; s < c; s++) {
                double v = 0;
                for (std::size_t k = 0; k < m; k++) {
                    v += solve(step + 1, index * m + k, w0 * single[r][k], w1 * single[s][k], nullptr);
                }
                if (v < best) {
                    best = v;
                    arg = {r, s};
                }
            }
        }
        if (out) {
            out->set_at(step, index, arg);
            for (std::size_t k = 0; k < m; k++) {
                solve(step + 1, index * m + k, w0 * single[arg.rho][k], w1 * single[arg.sigma][k], out);
            }
        }
        return best;
    }
};

}  // namespace detail

/// Exact minimum ML error over all feedback strategies of depth n whose
/// preparations come from `candidates`.
///
/// Leaves of different subtrees share no choices, so the optimal tree is
/// assembled bottom-up: each node takes the candidate pair minimizing the sum
/// of its children's optima. Ties keep the first pair in (rho, sigma)
/// row-major order, which also pins unreachable histories to (0, 0).
inline AdaptiveResult optimal_adaptive(const Povm &p, std::span<const DensityMatrix> candidates, std::size_t n,
                                       std::size_t cap = kDefaultAdaptiveWorkCap) {
    require_valid(p);
    if (candidates.empty() || n == 0) {
        throw DomainError("optimal_adaptive needs candidates and n >= 1");
    }
    const std::size_t c = candidates.size();
    const std::size_t m = p.size();
    if (c > cap || c * c > cap / m) {
        throw ResourceError("adaptive_cap", "optimal_adaptive work exceeds adaptive_cap = " + std::to_string(cap));
    }
    product_dim(c * c * m, n, cap, "adaptive_cap");

    std::vector<std::vector<double>> single;
    for (const auto &cand : candidates) {
        if (cand.dim() != p.dim()) {
            throw StructuralError("candidate and POVM dimensions differ");
        }
        single.push_back(outcome_probabilities(p, cand.matrix()));
    }
    AdaptiveStrategy strat(n, m);
    detail::AdaptiveSearch search{single, m, n, c};
    search.solve(0, 0, 1.0, 1.0, &strat);
    // Report the error through the same forward recursion used for any strategy.
    auto eval = evaluate_strategy(p, candidates, strat);
    return {eval.p_err, std::move(strat)};
}

}  // namespace detpower

#endif
