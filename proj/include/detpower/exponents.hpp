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

#ifndef DETPOWER_EXPONENTS_HPP
#define DETPOWER_EXPONENTS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "detpower/golden.hpp"
#include "detpower/povm.hpp"
#include "detpower/state.hpp"

namespace detpower {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Outcome distribution of a detector on a fixed state. Entries down to
/// -1e-12 are clamped to 0; the total must be 1 within 1e-9.
class ClassicalDistribution {
   public:
    explicit ClassicalDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.empty()) {
            throw DomainError("distribution must be nonempty");
        }
        double total = 0;
        for (auto &p : probs_) {
            if (!std::isfinite(p) || p < -1e-12) {
                throw DomainError("distribution entries must be finite and nonnegative");
            }
            p = std::max(p, 0.0);
            total += p;
        }
        if (std::abs(total - 1) > 1e-9) {
            throw DomainError("distribution does not sum to 1");
        }
    }

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t k) const { return probs_[k]; }
    std::span<const double> probs() const { return probs_; }

    friend bool operator==(const ClassicalDistribution &, const ClassicalDistribution &) = default;

   private:
    std::vector<double> probs_;
};

/// Re tr(E_k rho) for every k, negatives clamped to 0. No validation; hot loops use this.
inline std::vector<double> outcome_probabilities(const Povm &p, const ComplexMatrix &rho) {
    if (rho.dim() != p.dim()) {
        throw StructuralError("state and POVM dimensions differ");
    }
    std::vector<double> out(p.size());
    for (std::size_t k = 0; k < p.size(); k++) {
        out[k] = std::max(0.0, trace_of_product(p[k], rho).real());
    }
    return out;
}

/// <psi|E_k|psi> / <psi|psi> for every k.
inline std::vector<double> outcome_probabilities_pure(const Povm &p, std::span<const Complex> psi) {
    double n2 = 0;
    for (const auto &z : psi) {
        n2 += std::norm(z);
    }
    std::vector<double> out(p.size());
    for (std::size_t k = 0; k < p.size(); k++) {
        out[k] = std::max(0.0, expectation(p[k], psi).real() / n2);
    }
    return out;
}

/// P_k = tr(E_k rho).
inline ClassicalDistribution induced_distribution(const Povm &p, const DensityMatrix &rho) {
    if (rho.dim() != p.dim()) {
        throw StructuralError("state and POVM dimensions differ");
    }
    std::vector<double> out(p.size());
    for (std::size_t k = 0; k < p.size(); k++) {
        out[k] = trace_of_product(p[k], rho.matrix()).real();
    }
    return ClassicalDistribution(std::move(out));
}

/// Pre-logged common support of a pair (P, Pbar), for repeated evaluation of
/// phi(s) = log sum_k P_k^s Pbar_k^(1-s).
///
/// Only outcomes where both probabilities are positive contribute; this gives
/// phi(0) = log sum_{P_k>0} Pbar_k and phi(1) = log sum_{Pbar_k>0} P_k.
class PhiFunction {
   public:
    PhiFunction(std::span<const double> p, std::span<const double> q) {
        if (p.size() != q.size()) {
            throw StructuralError("distributions have different lengths");
        }
        for (std::size_t k = 0; k < p.size(); k++) {
            if (p[k] > 0 && q[k] > 0) {
                if (p[k] == q[k]) {
                    equal_mass_ += p[k];
                } else {
                    log_p_.push_back(std::log(p[k]));
                    log_q_.push_back(std::log(q[k]));
                }
                p_mass_ += p[k];
                q_mass_ += q[k];
            }
        }
    }

    /// True when no outcome has positive probability under both hypotheses.
    bool disjoint() const { return p_mass_ == 0; }

    double operator()(double s) const {
        if (disjoint()) {
            return -kInf;
        }
        if (s == 0) {
            return std::log(q_mass_);
        }
        if (s == 1) {
            return std::log(p_mass_);
        }
        double sum = equal_mass_;
        for (std::size_t k = 0; k < log_p_.size(); k++) {
            sum += std::exp(s * log_p_[k] + (1 - s) * log_q_[k]);
        }
        return std::log(sum);
    }

    /// Left derivative at s = 1: sum_k P_k log(P_k/Pbar_k) / sum_k P_k over the common support.
    double derivative_at_one() const {
        double num = 0;
        for (std::size_t k = 0; k < log_p_.size(); k++) {
            num += std::exp(log_p_[k]) * (log_p_[k] - log_q_[k]);
        }
        return num / p_mass_;
    }

   private:
    std::vector<double> log_p_;
    std::vector<double> log_q_;
    double equal_mass_ = 0;
    double p_mass_ = 0;
    double q_mass_ = 0;
};

/// phi(s | P || Pbar); -inf when the supports do not overlap.
inline double phi(double s, const ClassicalDistribution &p, const ClassicalDistribution &q) {
    return PhiFunction(p.probs(), q.probs())(s);
}

struct ExponentValue {
    /// Nonnegative, possibly +inf.
    double value = 0;
    /// Optimizing s in [0, 1] when the exponent involves one.
    std::optional<double> optimizer_s;

    bool infinite() const { return std::isinf(value); }
};

/// -min_{0<=s<=1} phi(s), by golden section on [0, 1] (phi is convex).
/// Falls back to a 10^4-point scan if sampled second differences say otherwise.
inline ExponentValue chernoff_exponent(std::span<const double> p, std::span<const double> q, double stol = 1e-12) {
    PhiFunction f(p, q);
    if (f.disjoint()) {
        return {kInf, std::nullopt};
    }

    constexpr int kProbe = 10;
    double probe[kProbe + 1];
    for (int i = 0; i <= kProbe; i++) {
        probe[i] = f(static_cast<double>(i) / kProbe);
    }
    bool convex = true;
    for (int i = 1; i < kProbe; i++) {
        if (probe[i + 1] - 2 * probe[i] + probe[i - 1] < -1e-10) {
            convex = false;
        }
    }

    ScalarMin best;
    if (convex) {
        best = golden_section_minimize(f, 0.0, 1.0, stol);
    } else {
        constexpr int kGrid = 10000;
        int arg = 0;
        double val = f(0.0);
        for (int i = 1; i <= kGrid; i++) {
            double v = f(static_cast<double>(i) / kGrid);
            if (v < val) {
                val = v;
                arg = i;
            }
        }
        double lo = std::max(0, arg - 1) / static_cast<double>(kGrid);
        double hi = std::min(kGrid, arg + 1) / static_cast<double>(kGrid);
        best = golden_section_minimize(f, lo, hi, stol);
        if (val < best.fx) {
            best = {static_cast<double>(arg) / kGrid, val};
        }
    }
    return {std::max(0.0, -best.fx), best.x};
}

inline ExponentValue chernoff_exponent(const ClassicalDistribution &p, const ClassicalDistribution &q) {
    return chernoff_exponent(p.probs(), q.probs());
}

/// D(P || Pbar) in nats; +inf when P puts mass where Pbar has none.
inline double relative_entropy(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw StructuralError("distributions have different lengths");
    }
    double d = 0;
    for (std::size_t k = 0; k < p.size(); k++) {
        if (p[k] <= 0) {
            continue;
        }
        if (q[k] <= 0) {
            return kInf;
        }
        d += p[k] * std::log(p[k] / q[k]);
    }
    return std::max(0.0, d);
}

inline double relative_entropy(const ClassicalDistribution &p, const ClassicalDistribution &q) {
    return relative_entropy(p.probs(), q.probs());
}

/// The Hoeffding objective (-s r - phi(s)) / (1 - s), with its s -> 1 limit.
///
/// At s = 1 the limit is -inf when -phi(1) < r, +inf when -phi(1) > r, and
/// r + phi'(1) on the boundary -phi(1) == r.
class HoeffdingObjective {
   public:
    HoeffdingObjective(std::span<const double> p, std::span<const double> q, double r) : phi_(p, q), r_(r) {
        if (!(r >= 0) || !std::isfinite(r)) {
            throw DomainError("Hoeffding rate must be finite and nonnegative");
        }
    }

    const PhiFunction &phi() const { return phi_; }

    double operator()(double s) const {
        if (phi_.disjoint()) {
            return kInf;
        }
        if (s >= 1) {
            double gap = -phi_(1.0) - r_;
            if (std::abs(gap) <= 1e-15) {
                return r_ + phi_.derivative_at_one();
            }
            return gap > 0 ? kInf : -kInf;
        }
        return (-s * r_ - phi_(s)) / (1 - s);
    }

   private:
    PhiFunction phi_;
    double r_;
};

/// sup_{0<=s<1} (-s r - phi(s)) / (1 - s), clamped at 0. At r = 0 this is D(P||Pbar).
inline ExponentValue hoeffding_exponent(std::span<const double> p, std::span<const double> q, double r,
                                        double stol = 1e-12) {
    HoeffdingObjective f(p, q, r);
    if (f.phi().disjoint()) {
        return {kInf, std::nullopt};
    }
    if (f(1.0) == kInf) {
        return {kInf, 1.0};
    }
    if (r == 0) {
        return {relative_entropy(p, q), 1.0};
    }
    // Quasi-concave in s: superlevel sets of a concave numerator over a positive affine denominator.
    auto best = golden_section_maximize(f, 0.0, 1.0, stol);
    return {std::max(0.0, best.fx), best.x};
}

inline ExponentValue hoeffding_exponent(const ClassicalDistribution &p, const ClassicalDistribution &q, double r) {
    return hoeffding_exponent(p.probs(), q.probs(), r);
}

}  // namespace detpower

#endif
