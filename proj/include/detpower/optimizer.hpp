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

#ifndef DETPOWER_OPTIMIZER_HPP
#define DETPOWER_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "detpower/eigen.hpp"
#include "detpower/exponents.hpp"
#include "detpower/golden.hpp"
#include "detpower/parallel.hpp"
#include "detpower/povm.hpp"
#include "detpower/state.hpp"

namespace detpower {

struct StatePair {
    DensityMatrix rho;
    DensityMatrix sigma;

    StatePair(DensityMatrix r, DensityMatrix s) : rho(std::move(r)), sigma(std::move(s)) {
        if (rho.dim() != sigma.dim()) {
            throw StructuralError("state pair dimensions differ");
        }
    }
};

struct SearchOptions {
    int restarts = 64;
    std::uint64_t seed = 0;
    /// Refine the best pure pair over mixed states as well.
    bool mixed = false;
    /// Stop a local refinement once a sweep improves the objective by less than this.
    double tol = 1e-10;
    int max_sweeps = 200;
    /// Cap on groupings whose eigenvectors seed the exhaustive phase.
    std::size_t max_groupings = 4096;
    /// 0 = DETPOWER_THREADS or hardware concurrency.
    unsigned threads = 0;
};

struct PowerReport {
    double value = 0;
    StatePair optimizer;
    std::optional<GroupingMask> grouping;
    std::optional<double> s_star;
    int restarts_used = 0;
    /// Best value over orthogonal eigenvector pairs of the groupings only.
    std::optional<double> restricted_value;
};

/// Largest grouping count enumerated by single_shot_power (2^(m-1) - 1 groupings).
inline constexpr std::size_t kMaxSingleShotOutcomes = 24;

/// p*_err = 1/2 - max_a (lambda_max(E^a) - lambda_min(E^a)) / 2 over all
/// nontrivial groupings a, attained by the top/bottom eigenvectors of E^a.
inline PowerReport single_shot_power(const Povm &p) {
    require_valid(p);
    const std::size_t m = p.size();
    if (m > kMaxSingleShotOutcomes) {
        throw ResourceError("grouping_cap", "single_shot_power enumerates 2^(m-1) groupings; m = " +
                                                std::to_string(m) + " exceeds " +
                                                std::to_string(kMaxSingleShotOutcomes) + ", use a heuristic search");
    }
    // a and its complement have the same spread, so the last outcome is pinned to a-bar.
    const OutcomeMask count = OutcomeMask{1} << (m - 1);
    double best_spread = -1;
    OutcomeMask best_mask = 1;
    EigenDecomposition best_eig;
    for (OutcomeMask a = 1; a < count; a++) {
        auto e = eig_hermitian(grouped_element(p, a));
        double spread = e.values.front() - e.values.back();
        if (spread > best_spread) {
            best_spread = spread;
            best_mask = a;
            best_eig = std::move(e);
        }
    }
    const std::size_t d = p.dim();
    PowerReport rep{std::clamp(0.5 - best_spread / 2, 0.0, 0.5),
                    StatePair(DensityMatrix::pure(best_eig.vector(0)), DensityMatrix::pure(best_eig.vector(d - 1))),
                    GroupingMask::from_bits(best_mask, m), std::nullopt, 0, std::nullopt};
    return rep;
}

/// (1/2) sum_k min(P_k, Pbar_k): the single-use error of the best grouping for a fixed pair.
inline double single_shot_error(const Povm &p, const DensityMatrix &rho, const DensityMatrix &sigma) {
    auto a = outcome_probabilities(p, rho.matrix());
    auto b = outcome_probabilities(p, sigma.matrix());
    double s = 0;
    for (std::size_t k = 0; k < a.size(); k++) {
        s += std::min(a[k], b[k]);
    }
    return s / 2;
}

/// Which asymptotic exponent a state-pair search maximizes.
struct Objective {
    enum class Kind { chernoff, stein, hoeffding };
    Kind kind = Kind::chernoff;
    double rate = 0;

    static Objective chernoff() { return {Kind::chernoff, 0}; }
    static Objective stein() { return {Kind::stein, 0}; }
    static Objective hoeffding(double r) {
        if (!(r >= 0) || !std::isfinite(r)) {
            throw DomainError("Hoeffding rate must be finite and nonnegative");
        }
        return {Kind::hoeffding, r};
    }

    std::string name() const {
        switch (kind) {
            case Kind::chernoff:
                return "chernoff";
            case Kind::stein:
                return "stein";
            case Kind::hoeffding:
                return "hoeffding";
        }
        return "";
    }

    /// Invariant under rho <-> sigma.
    bool symmetric() const { return kind == Kind::chernoff; }
    /// The exponent is a supremum over s that the local search treats as one more coordinate.
    bool has_s() const { return kind == Kind::chernoff || (kind == Kind::hoeffding && rate > 0); }

    ExponentValue exact(std::span<const double> p, std::span<const double> q) const {
        switch (kind) {
            case Kind::chernoff:
                return chernoff_exponent(p, q);
            case Kind::stein:
                return {relative_entropy(p, q), std::nullopt};
            case Kind::hoeffding:
                return hoeffding_exponent(p, q, rate);
        }
        return {};
    }

    /// The objective at a fixed s; its supremum over s is exact(p, q).
    double at(std::span<const double> p, std::span<const double> q, double s) const {
        switch (kind) {
            case Kind::chernoff: {
                PhiFunction f(p, q);
                return f.disjoint() ? kInf : -f(s);
            }
            case Kind::stein:
                return relative_entropy(p, q);
            case Kind::hoeffding:
                if (rate == 0) {
                    return relative_entropy(p, q);
                }
                return HoeffdingObjective(p, q, rate)(s);
        }
        return 0;
    }
};

namespace detail {

/// Real parameters of a pure state: psi_j = x[2j] + i x[2j+1].
inline std::vector<Complex> decode_pure(std::span<const double> x) {
    std::vector<Complex> psi(x.size() / 2);
    for (std::size_t j = 0; j < psi.size(); j++) {
        psi[j] = Complex(x[2 * j], x[2 * j + 1]);
    }
    return psi;
}

inline std::vector<double> encode_pure(std::span<const Complex> psi) {
    std::vector<double> x(2 * psi.size());
    for (std::size_t j = 0; j < psi.size(); j++) {
        x[2 * j] = psi[j].real();
        x[2 * j + 1] = psi[j].imag();
    }
    return x;
}

/// Real parameters of A in rho = A A^dagger / tr(A A^dagger), row-major, (re, im) interleaved.
inline ComplexMatrix decode_mixed(std::span<const double> x, std::size_t d) {
    ComplexMatrix a(d);
    for (std::size_t i = 0; i < d; i++) {
        for (std::size_t j = 0; j < d; j++) {
            a(i, j) = Complex(x[2 * (i * d + j)], x[2 * (i * d + j) + 1]);
        }
    }
    auto rho = a * a.adjoint();
    rho *= Complex(1 / rho.trace().real());
    return rho;
}

inline DensityMatrix density_from_matrix(ComplexMatrix m) {
    // Restore exact Hermiticity and unit trace lost to rounding.
    auto h = (m + m.adjoint()) * Complex(0.5);
    h *= Complex(1 / h.trace().real());
    return DensityMatrix(std::move(h));
}

/// Coordinate-wise golden-section ascent of f over x.
///
/// Every coordinate except `s_index` is searched on a local bracket
/// [x_i - h_i, x_i + h_i] whose half-width follows the last accepted step;
/// the s coordinate is searched over all of [0, 1]. Stops when two
/// consecutive sweeps gain less than tol * max(1, |f|), or f reaches +inf.
template <typename F, typename Normalize>
double coordinate_ascent(std::vector<double> &x, F &&f, std::optional<std::size_t> s_index, double tol,
                         int max_sweeps, Normalize &&normalize) {
    constexpr double kMinHalfWidth = 1e-9;
    constexpr double kMaxHalfWidth = 1.0;
    double fx = f(x);
    std::vector<double> h(x.size(), 0.5);
    int stall = 0;
    for (int sweep = 0; sweep < max_sweeps && !std::isinf(fx); sweep++) {
        const double start = fx;
        for (std::size_t i = 0; i < x.size(); i++) {
            const bool is_s = s_index && *s_index == i;
            const double lo = is_s ? 0.0 : x[i] - h[i];
            const double hi = is_s ? 1.0 : x[i] + h[i];
            const double xtol = is_s ? 1e-10 : std::max(h[i] * 1e-4, 1e-12);
            auto line = [&](double t) {
                double old = x[i];
                x[i] = t;
                double v = f(x);
                x[i] = old;
                return v;
            };
            auto r = golden_section_maximize(line, lo, hi, xtol);
            if (r.fx > fx) {
                double step = std::abs(r.x - x[i]);
                x[i] = r.x;
                fx = r.fx;
                if (!is_s) {
                    h[i] = std::clamp(2 * step, kMinHalfWidth, kMaxHalfWidth);
                }
            } else if (!is_s) {
                h[i] = std::max(h[i] / 2, kMinHalfWidth);
            }
            if (std::isinf(fx)) {
                break;
            }
        }
        normalize(x);
        if (fx - start <= tol * std::max(1.0, std::abs(fx))) {
            if (++stall >= 2) {
                break;
            }
        } else {
            stall = 0;
        }
    }
    return fx;
}

struct Candidate {
    double value = -kInf;
    ComplexMatrix rho;
    ComplexMatrix sigma;
};

inline void normalize_halves(std::vector<double> &x, std::size_t half) {
    for (std::size_t part = 0; part < 2; part++) {
        double n2 = 0;
        for (std::size_t i = part * half; i < (part + 1) * half; i++) {
            n2 += x[i] * x[i];
        }
        if (n2 > 0) {
            double inv = 1 / std::sqrt(n2);
            for (std::size_t i = part * half; i < (part + 1) * half; i++) {
                x[i] *= inv;
            }
        }
    }
}

/// Local refinement over pure pairs from (psi_rho, psi_sigma).
inline Candidate refine_pure(const Objective &obj, const Povm &p, std::span<const Complex> psi_rho,
                             std::span<const Complex> psi_sigma, const SearchOptions &opts) {
    const std::size_t d = p.dim();
    const std::size_t half = 2 * d;
    std::vector<double> x = encode_pure(psi_rho);
    auto xs = encode_pure(psi_sigma);
    x.insert(x.end(), xs.begin(), xs.end());
    std::optional<std::size_t> s_index;
    if (obj.has_s()) {
        s_index = x.size();
        x.push_back(0.5);
    }
    auto f = [&](const std::vector<double> &v) {
        auto a = outcome_probabilities_pure(p, decode_pure(std::span(v).subspan(0, half)));
        auto b = outcome_probabilities_pure(p, decode_pure(std::span(v).subspan(half, half)));
        return obj.at(a, b, s_index ? v[*s_index] : 0.0);
    };
    coordinate_ascent(x, f, s_index, opts.tol, opts.max_sweeps, [&](std::vector<double> &v) { normalize_halves(v, half); });
    normalize_halves(x, half);
    Candidate c;
    c.rho = ComplexMatrix::outer(decode_pure(std::span(x).subspan(0, half)));
    c.sigma = ComplexMatrix::outer(decode_pure(std::span(x).subspan(half, half)));
    c.value = obj.exact(outcome_probabilities(p, c.rho), outcome_probabilities(p, c.sigma)).value;
    return c;
}

/// Local refinement over mixed pairs, parametrized as A A^dagger / tr, from a given pair.
inline Candidate refine_mixed(const Objective &obj, const Povm &p, const ComplexMatrix &rho0,
                              const ComplexMatrix &sigma0, const SearchOptions &opts) {
    const std::size_t d = p.dim();
    const std::size_t half = 2 * d * d;
    // A = V sqrt(Lambda) reproduces the starting state exactly.
    auto factor = [&](const ComplexMatrix &rho) {
        auto e = eig_hermitian(rho);
        std::vector<double> x(half);
        for (std::size_t i = 0; i < d; i++) {
            for (std::size_t j = 0; j < d; j++) {
                Complex a = e.vectors(i, j) * std::sqrt(std::max(0.0, e.values[j]));
                x[2 * (i * d + j)] = a.real();
                x[2 * (i * d + j) + 1] = a.imag();
            }
        }
        return x;
    };
    std::vector<double> x = factor(rho0);
    auto xs = factor(sigma0);
    x.insert(x.end(), xs.begin(), xs.end());
    std::optional<std::size_t> s_index;
    if (obj.has_s()) {
        s_index = x.size();
        x.push_back(0.5);
    }
    auto f = [&](const std::vector<double> &v) {
        auto a = outcome_probabilities(p, decode_mixed(std::span(v).subspan(0, half), d));
        auto b = outcome_probabilities(p, decode_mixed(std::span(v).subspan(half, half), d));
        return obj.at(a, b, s_index ? v[*s_index] : 0.0);
    };
    coordinate_ascent(x, f, s_index, opts.tol, opts.max_sweeps, [&](std::vector<double> &v) { normalize_halves(v, half); });
    Candidate c;
    c.rho = decode_mixed(std::span(x).subspan(0, half), d);
    c.sigma = decode_mixed(std::span(x).subspan(half, half), d);
    c.value = obj.exact(outcome_probabilities(p, c.rho), outcome_probabilities(p, c.sigma)).value;
    return c;
}

/// Groupings whose eigenvectors seed the exhaustive phase: every nontrivial
/// grouping up to complement when that fits under the cap, else singletons.
inline std::vector<OutcomeMask> seed_groupings(std::size_t m, std::size_t cap) {
    std::vector<OutcomeMask> out;
    if (m - 1 < 63 && (OutcomeMask{1} << (m - 1)) - 1 <= cap) {
        for (OutcomeMask a = 1; a < (OutcomeMask{1} << (m - 1)); a++) {
            out.push_back(a);
        }
        return out;
    }
    for (std::size_t k = 0; k < m && k < 64 && out.size() < cap; k++) {
        out.push_back(OutcomeMask{1} << k);
    }
    return out;
}

inline std::vector<Complex> random_unit_vector(std::size_t d, std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss;
    std::vector<Complex> v(d);
    double n2 = 0;
    while (!(n2 > 1e-12)) {
        n2 = 0;
        for (auto &z : v) {
            z = Complex(gauss(rng), gauss(rng));
            n2 += std::norm(z);
        }
    }
    for (auto &z : v) {
        z /= std::sqrt(n2);
    }
    return v;
}

}  // namespace detail

/// Maximize an asymptotic exponent over input pairs (rho, sigma).
///
/// (a) exhaustive: orthogonal pairs of eigenvectors of E^a for the seed
///     groupings; the best of these is reported as `restricted_value` and
///     then refined locally;
/// (b) opts.restarts random pure pairs, each refined by coordinate-wise
///     golden section (restart i is seeded from (opts.seed, i), so the result
///     does not depend on the thread count);
/// (c) with opts.mixed, a mixed-state refinement of the best pair.
/// A pair with an infinite exponent ends the search immediately.
inline PowerReport optimize_state_pair(const Objective &obj, const Povm &p, const SearchOptions &opts = {}) {
    require_valid(p);
    const std::size_t d = p.dim();

    detail::Candidate best;
    for (OutcomeMask a : detail::seed_groupings(p.size(), opts.max_groupings)) {
        auto e = eig_hermitian(grouped_element(p, a));
        for (std::size_t i = 0; i < d; i++) {
            for (std::size_t j = 0; j < d; j++) {
                if (i == j || (obj.symmetric() && j < i)) {
                    continue;
                }
                auto rho = ComplexMatrix::outer(e.vector(i));
                auto sigma = ComplexMatrix::outer(e.vector(j));
                double v = obj.exact(outcome_probabilities(p, rho), outcome_probabilities(p, sigma)).value;
                if (v > best.value) {
                    best = {v, std::move(rho), std::move(sigma)};
                }
            }
        }
    }
    const double restricted = best.value;
    int restarts_used = 0;

    auto top_vector = [](const ComplexMatrix &m) { return eig_hermitian(m).vector(0); };
    if (!std::isinf(best.value)) {
        auto local = detail::refine_pure(obj, p, top_vector(best.rho), top_vector(best.sigma), opts);
        if (local.value > best.value) {
            best = std::move(local);
        }
    }

    if (!std::isinf(best.value) && opts.restarts > 0) {
        auto runs = parallel_map<detail::Candidate>(
            static_cast<std::size_t>(opts.restarts), resolve_threads(opts.threads), [&](std::size_t r) {
                std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                                  static_cast<std::uint32_t>(r)};
                std::mt19937_64 rng(seq);
                auto psi_rho = detail::random_unit_vector(d, rng);
                auto psi_sigma = detail::random_unit_vector(d, rng);
                return detail::refine_pure(obj, p, psi_rho, psi_sigma, opts);
            });
        restarts_used = opts.restarts;
        for (auto &c : runs) {
            if (c.value > best.value) {
                best = std::move(c);
            }
        }
    }

    if (opts.mixed && !std::isinf(best.value)) {
        auto local = detail::refine_mixed(obj, p, best.rho, best.sigma, opts);
        if (local.value > best.value) {
            best = std::move(local);
        }
    }

    StatePair pair(detail::density_from_matrix(best.rho), detail::density_from_matrix(best.sigma));
    auto exact = obj.exact(outcome_probabilities(p, pair.rho.matrix()), outcome_probabilities(p, pair.sigma.matrix()));
    return PowerReport{exact.value, std::move(pair), std::nullopt, exact.optimizer_s, restarts_used, restricted};
}

/// Dual Chernoff exponent: max over pairs of -min_s phi(s | P || Pbar).
inline PowerReport zeta_chernoff(const Povm &p, const SearchOptions &opts = {}) {
    return optimize_state_pair(Objective::chernoff(), p, opts);
}

/// Dual Stein exponent: max over pairs of D(P || Pbar).
inline PowerReport zeta_stein(const Povm &p, const SearchOptions &opts = {}) {
    return optimize_state_pair(Objective::stein(), p, opts);
}

/// Dual Hoeffding exponent at rate r.
inline PowerReport zeta_hoeffding(const Povm &p, double r, const SearchOptions &opts = {}) {
    return optimize_state_pair(Objective::hoeffding(r), p, opts);
}

}  // namespace detpower

#endif
