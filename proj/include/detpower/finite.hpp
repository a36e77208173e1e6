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

#ifndef DETPOWER_FINITE_HPP
#define DETPOWER_FINITE_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "detpower/exponents.hpp"
#include "detpower/parallel.hpp"
#include "detpower/povm.hpp"
#include "detpower/state.hpp"

namespace detpower {

/// Dense outcome-sequence distributions are capped at m^n entries.
inline constexpr std::size_t kDefaultSequenceCap = std::size_t{1} << 20;
/// brute_force_grouping enumerates 2^(m^n) partitions only up to m^n = 20.
inline constexpr std::size_t kBruteForceCap = 20;
/// best_product_pair work bound: patterns times m^n.
inline constexpr std::size_t kDefaultPatternWorkCap = std::size_t{1} << 24;
/// Binomial aggregation handles up to this many slots.
inline constexpr std::size_t kMaxAggregatedSlots = 100000;

/// rho_1 (x) ... (x) rho_n, one factor per use of the detector.
struct ProductInput {
    std::vector<DensityMatrix> factors;

    explicit ProductInput(std::vector<DensityMatrix> f) : factors(std::move(f)) {
        if (factors.empty()) {
            throw StructuralError("product input needs at least one factor");
        }
        for (const auto &r : factors) {
            if (r.dim() != factors.front().dim()) {
                throw StructuralError("product input factors have mismatched dimensions");
            }
        }
    }

    static ProductInput iid(const DensityMatrix &rho, std::size_t n) {
        return ProductInput(std::vector<DensityMatrix>(n, rho));
    }

    /// factors[i] = candidates[pattern[i]]
    static ProductInput from_pattern(std::span<const DensityMatrix> candidates, std::span<const std::size_t> pattern) {
        std::vector<DensityMatrix> f;
        for (auto c : pattern) {
            if (c >= candidates.size()) {
                throw DomainError("pattern refers to a missing candidate");
            }
            f.push_back(candidates[c]);
        }
        return ProductInput(std::move(f));
    }

    std::size_t size() const { return factors.size(); }
};

/// P(k^n) over all m^n outcome sequences. Index of (k_1, ..., k_n) is
/// sum_i k_i m^(n-i), i.e. k_1 is the most significant digit, matching the
/// ordering of E_{k_1} (x) ... (x) E_{k_n}.
struct SequenceDistribution {
    std::size_t outcomes = 0;
    std::size_t slots = 0;
    std::vector<double> probs;

    std::size_t size() const { return probs.size(); }

    /// 0-based outcome digits of sequence `index`.
    std::vector<std::size_t> sequence(std::size_t index) const {
        std::vector<std::size_t> seq(slots);
        for (std::size_t i = slots; i-- > 0;) {
            seq[i] = index % outcomes;
            index /= outcomes;
        }
        return seq;
    }
};

/// "k_1 k_2 ... k_n" with 1-based outcome labels, e.g. "221".
inline std::string sequence_label(std::span<const std::size_t> seq) {
    std::string s;
    for (auto k : seq) {
        s += std::to_string(k + 1);
    }
    return s;
}

/// m^n, or ResourceError beyond `cap`.
inline std::size_t sequence_count(std::size_t m, std::size_t n, std::size_t cap, const char *cap_name) {
    return product_dim(m, n, cap, cap_name);
}

/// probs(k^n) = prod_i tr(E_{k_i} rho_i).
inline SequenceDistribution sequence_distribution(const Povm &p, const ProductInput &input,
                                                  std::size_t cap = kDefaultSequenceCap) {
    if (input.factors.front().dim() != p.dim()) {
        throw StructuralError("product input and POVM dimensions differ");
    }
    const std::size_t m = p.size();
    const std::size_t n = input.size();
    sequence_count(m, n, cap, "sequence_cap");
    SequenceDistribution out{m, n, {1.0}};
    for (const auto &rho : input.factors) {
        auto single = outcome_probabilities(p, rho.matrix());
        std::vector<double> next(out.probs.size() * m);
        for (std::size_t i = 0; i < out.probs.size(); i++) {
            for (std::size_t k = 0; k < m; k++) {
                next[i * m + k] = out.probs[i] * single[k];
            }
        }
        out.probs = std::move(next);
    }
    return out;
}

struct GroupingResult {
    double p_err = 0.5;
    GroupingMask grouping;
};

/// (alpha + beta) / 2 for the test that accepts H0 on `a`: sequences outside
/// `a` cost P, sequences inside cost Pbar. Summed in index order.
inline double grouping_error(const SequenceDistribution &p, const SequenceDistribution &q, const GroupingMask &a) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); i++) {
        s += a.accept[i] ? q.probs[i] : p.probs[i];
    }
    return s / 2;
}

inline void require_same_index_set(const SequenceDistribution &p, const SequenceDistribution &q) {
    if (p.outcomes != q.outcomes || p.slots != q.slots || p.size() != q.size()) {
        throw StructuralError("sequence distributions are over different index sets");
    }
}

/// Maximum-likelihood test: a = {k^n : P >= Pbar} (ties accept H0), so
/// p_err = (1/2) sum min(P, Pbar).
inline GroupingResult ml_error_probability(const SequenceDistribution &p, const SequenceDistribution &q) {
    require_same_index_set(p, q);
    GroupingMask a{std::vector<bool>(p.size())};
    for (std::size_t i = 0; i < p.size(); i++) {
        a.accept[i] = p.probs[i] >= q.probs[i];
    }
    double e = grouping_error(p, q, a);
    return {e, std::move(a)};
}

/// Minimum of grouping_error over all 2^(m^n) partitions. Only for m^n <= 20.
inline GroupingResult brute_force_grouping(const SequenceDistribution &p, const SequenceDistribution &q) {
    require_same_index_set(p, q);
    const std::size_t count = p.size();
    if (count > kBruteForceCap) {
        throw ResourceError("brute_force_cap", "brute_force_grouping needs m^n <= " + std::to_string(kBruteForceCap) +
                                                   ", got " + std::to_string(count));
    }
    GroupingResult best{std::numeric_limits<double>::infinity(), {}};
    GroupingMask a{std::vector<bool>(count)};
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << count); bits++) {
        for (std::size_t i = 0; i < count; i++) {
            a.accept[i] = (bits >> i) & 1;
        }
        double e = grouping_error(p, q, a);
        if (e < best.p_err) {
            best = {e, a};
        }
    }
    return best;
}

struct PatternResult {
    double p_err = 0.5;
    std::vector<std::size_t> rho_pattern;
    std::vector<std::size_t> sigma_pattern;
    /// sigma_pattern was forced to the complement of rho_pattern.
    bool complement = false;
};

/// Digits of a pattern, e.g. "001".
inline std::string pattern_label(std::span<const std::size_t> pattern) {
    std::string s;
    for (auto c : pattern) {
        s += std::to_string(c);
    }
    return s;
}

/// Best ML error over assignments of candidate states to the n slots of both hypotheses.
///
/// For two mutually orthogonal candidates the sigma pattern is the complement
/// of the rho pattern (2^n assignments); otherwise every (rho, sigma) pattern
/// pair is tried. Patterns are enumerated as base-|C| numbers with slot 1 most
/// significant, and a later pattern replaces the incumbent only if it is lower
/// by more than 1e-12, so permutation-equivalent ties resolve to the first.
inline PatternResult best_product_pair(const Povm &p, std::size_t n, std::span<const DensityMatrix> candidates,
                                       std::size_t cap = kDefaultPatternWorkCap) {
    const std::size_t c = candidates.size();
    if (c == 0 || n == 0) {
        throw DomainError("best_product_pair needs candidates and n >= 1");
    }
    for (const auto &r : candidates) {
        if (r.dim() != p.dim()) {
            throw StructuralError("candidate and POVM dimensions differ");
        }
    }
    const bool complement =
        c == 2 && std::abs(trace_of_product(candidates[0].matrix(), candidates[1].matrix())) <= 1e-12;
    const std::size_t seqs = sequence_count(p.size(), n, kDefaultSequenceCap, "sequence_cap");
    const std::size_t rho_patterns = product_dim(c, n, cap, "pattern_cap");
    const std::size_t sigma_patterns = complement ? 1 : rho_patterns;
    if (rho_patterns * sigma_patterns > cap / seqs) {
        throw ResourceError("pattern_cap", "best_product_pair work exceeds pattern_cap = " + std::to_string(cap));
    }

    auto decode = [&](std::size_t index) {
        std::vector<std::size_t> pat(n);
        for (std::size_t i = n; i-- > 0;) {
            pat[i] = index % c;
            index /= c;
        }
        return pat;
    };

    std::vector<SequenceDistribution> dists(rho_patterns);
    for (std::size_t r = 0; r < rho_patterns; r++) {
        dists[r] = sequence_distribution(p, ProductInput::from_pattern(candidates, decode(r)));
    }

    PatternResult best;
    best.p_err = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rho_patterns; r++) {
        for (std::size_t s = 0; s < sigma_patterns; s++) {
            auto rp = decode(r);
            std::vector<std::size_t> sp;
            std::size_t sidx = s;
            if (complement) {
                sp = rp;
                for (auto &v : sp) {
                    v = 1 - v;
                }
                sidx = 0;
                for (auto v : sp) {
                    sidx = sidx * 2 + v;
                }
            } else {
                sp = decode(s);
            }
            double e = ml_error_probability(dists[r], dists[sidx]).p_err;
            if (e < best.p_err - 1e-12) {
                best = {e, rp, sp, complement};
            }
        }
    }
    return best;
}

/// Two-outcome qubit detector in its eigenbasis: E_1 = diag(p, q), p >= q.
struct CommutingQubitPovm {
    double p = 0;
    double q = 0;
    /// Eigenvectors of E_1 for p and q: the states rho_0 and rho_1.
    DensityMatrix rho0;
    DensityMatrix rho1;
};

/// Diagonalizes a two-element qubit POVM. UnsupportedError for anything else.
inline CommutingQubitPovm as_commuting_qubit(const Povm &povm) {
    require_valid(povm);
    if (povm.dim() != 2 || povm.size() != 2) {
        throw UnsupportedError("binomial aggregation needs a two-outcome qubit POVM");
    }
    if ((povm[0] * povm[1] - povm[1] * povm[0]).max_abs() > tol::herm) {
        throw UnsupportedError("binomial aggregation needs commuting POVM elements");
    }
    auto e = eig_hermitian(povm[0]);
    return {std::clamp(e.values[0], 0.0, 1.0), std::clamp(e.values[1], 0.0, 1.0), DensityMatrix::pure(e.vector(0)),
            DensityMatrix::pure(e.vector(1))};
}

struct SweepPoint {
    /// Number of leading rho_0 slots in the H0 input.
    std::size_t m = 0;
    double x = 0;
    double p_err = 0;
    double log_p_err = 0;
    /// -(1/n) log p_err
    double rate = 0;
};

namespace detail {

inline double log_binomial(std::size_t n, std::size_t k) {
    return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
           std::lgamma(static_cast<double>(n - k) + 1);
}

/// count * log(v), with 0 * log(0) = 0.
inline double xlog(std::size_t count, double v) {
    return count == 0 ? 0.0 : static_cast<double>(count) * std::log(v);
}

/// Log-domain ML error for (rho_0^{m} rho_1^{n-m}, rho_1^{m} rho_0^{n-m}).
///
/// Only the counts i, j of outcome 1 in the two blocks matter, so the m^n
/// sequences collapse to (m+1)(n-m+1) classes weighted by C(m,i) C(n-m,j).
inline double sweep_log_error(double p, double q, std::size_t n, std::size_t m) {
    double acc = -std::numeric_limits<double>::infinity();
    auto add = [&](double lv) {
        if (lv == -std::numeric_limits<double>::infinity()) {
            return;
        }
        if (acc < lv) {
            std::swap(acc, lv);
        }
        acc = acc + std::log1p(std::exp(lv - acc));
    };
    const std::size_t rest = n - m;
    for (std::size_t i = 0; i <= m; i++) {
        for (std::size_t j = 0; j <= rest; j++) {
            double lp = xlog(i, p) + xlog(m - i, 1 - p) + xlog(j, q) + xlog(rest - j, 1 - q);
            double lq = xlog(i, q) + xlog(m - i, 1 - q) + xlog(j, p) + xlog(rest - j, 1 - p);
            add(log_binomial(m, i) + log_binomial(rest, j) + std::min(lp, lq));
        }
    }
    return acc - std::log(2.0);
}

inline SweepPoint make_point(std::size_t n, std::size_t m, double log_err) {
    return {m, static_cast<double>(m) / static_cast<double>(n), std::exp(log_err), log_err,
            -log_err / static_cast<double>(n)};
}

}  // namespace detail

/// ML error for the pairs (rho_0^{(x) m} (x) rho_1^{(x) n-m}, rho_1^{(x) m} (x) rho_0^{(x) n-m}),
/// m = 0..n, by binomial aggregation. Needs a two-outcome qubit POVM.
inline std::vector<SweepPoint> sweep_x(const Povm &povm, std::size_t n, unsigned threads = 0) {
    auto cq = as_commuting_qubit(povm);
    if (n == 0 || n > kMaxAggregatedSlots) {
        throw ResourceError("aggregated_slots_cap", "sweep_x needs 1 <= n <= " + std::to_string(kMaxAggregatedSlots));
    }
    return parallel_map<SweepPoint>(n + 1, resolve_threads(threads), [&](std::size_t m) {
        return detail::make_point(n, m, detail::sweep_log_error(cq.p, cq.q, n, m));
    });
}

/// -(1/n) log p_err for the i.i.d. eigenbasis pair (rho_0^{(x) n}, rho_1^{(x) n}).
inline double empirical_rate(const Povm &povm, std::size_t n) {
    auto cq = as_commuting_qubit(povm);
    if (n == 0 || n > kMaxAggregatedSlots) {
        throw ResourceError("aggregated_slots_cap",
                            "empirical_rate needs 1 <= n <= " + std::to_string(kMaxAggregatedSlots));
    }
    return -detail::sweep_log_error(cq.p, cq.q, n, n) / static_cast<double>(n);
}

}  // namespace detpower

#endif
