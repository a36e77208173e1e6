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

#ifndef DETPOWER_CLOSED_FORMS_HPP
#define DETPOWER_CLOSED_FORMS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "detpower/exponents.hpp"
#include "detpower/optimizer.hpp"
#include "detpower/povm.hpp"
#include "detpower/state.hpp"

namespace detpower {

/// C_s = s(1-s) pi / sin(s pi) for the covariant qubit POVM, extended by
/// continuity to 1 at s = 0 and s = 1. Its minimum pi/4 sits at s = 1/2.
inline double covariant_c_s(double s) {
    if (!(s >= 0 && s <= 1)) {
        throw DomainError("s must lie in [0, 1]");
    }
    if (s == 0 || s == 1) {
        return 1.0;
    }
    // sin(s pi) = sin((1-s) pi); taking the smaller argument avoids the
    // cancellation in s * pi near s = 1.
    return s * (1 - s) * std::numbers::pi / std::sin(std::min(s, 1 - s) * std::numbers::pi);
}

/// M unit Bloch vectors closed under n -> -n: a Fibonacci lattice of M/2
/// points, each followed by its exact antipode, so the nodes sum to zero
/// pair by pair and the POVM {(I + n.sigma)/M} is complete up to rounding.
class CovariantDiscretization {
   public:
    explicit CovariantDiscretization(std::vector<BlochVector> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.size() < 2 || nodes_.size() % 2 != 0) {
            throw StructuralError("covariant discretization needs an even number M >= 2 of nodes");
        }
        double sx = 0, sy = 0, sz = 0;
        for (std::size_t i = 0; i < nodes_.size(); i += 2) {
            const auto &a = nodes_[i];
            const auto &b = nodes_[i + 1];
            sx += a.x + b.x;
            sy += a.y + b.y;
            sz += a.z + b.z;
        }
        if (sx != 0 || sy != 0 || sz != 0) {
            throw StructuralError("covariant nodes must sum to zero");
        }
        for (const auto &n : nodes_) {
            if (std::abs(n.norm() - 1) > 1e-12) {
                throw StructuralError("covariant nodes must be unit vectors");
            }
        }
    }

    static CovariantDiscretization fibonacci(std::size_t m) {
        if (m < 2 || m % 2 != 0) {
            throw DomainError("M must be even and at least 2");
        }
        const std::size_t half = m / 2;
        const double golden_angle = std::numbers::pi * (3 - std::sqrt(5.0));
        std::vector<BlochVector> nodes;
        nodes.reserve(m);
        for (std::size_t i = 0; i < half; i++) {
            double z = 1 - (2.0 * static_cast<double>(i) + 1) / static_cast<double>(half);
            double r = std::sqrt(std::max(0.0, 1 - z * z));
            double phi = golden_angle * static_cast<double>(i);
            BlochVector n{r * std::cos(phi), r * std::sin(phi), z};
            double len = n.norm();
            n = {n.x / len, n.y / len, n.z / len};
            nodes.push_back(n);
            nodes.push_back(-n);
        }
        return CovariantDiscretization(std::move(nodes));
    }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<BlochVector> &nodes() const { return nodes_; }

    /// Elements (I + n_i . sigma) / M.
    Povm povm() const {
        const double w = 1.0 / static_cast<double>(nodes_.size());
        std::vector<ComplexMatrix> els;
        els.reserve(nodes_.size());
        for (const auto &n : nodes_) {
            els.push_back({{Complex(w * (1 + n.z)), Complex(w * n.x, -w * n.y)},
                           {Complex(w * n.x, w * n.y), Complex(w * (1 - n.z))}});
        }
        return Povm(std::move(els));
    }

   private:
    std::vector<BlochVector> nodes_;
};

/// Chernoff exponent of the discretized covariant POVM on the pure pair
/// with Bloch vectors a and b.
inline double covariant_pair_exponent(const Povm &covariant, const BlochVector &a, const BlochVector &b) {
    auto pa = outcome_probabilities(covariant, bloch_to_density(a).matrix());
    auto pb = outcome_probabilities(covariant, bloch_to_density(b).matrix());
    return chernoff_exponent(pa, pb).value;
}

/// Chernoff exponent of the discretized covariant POVM on the antipodal
/// pure pair along the lattice's polar axis. The continuous POVM is rotation
/// invariant; on the polar axis the lattice acts as a midpoint rule in z, so
/// the value converges monotonically to ln(4/pi). M = 2 is a projective
/// measurement along its single node axis, evaluated there: +infinity.
inline double covariant_zeta_numeric(const CovariantDiscretization &disc) {
    auto p = disc.povm();
    require_valid(p);
    const BlochVector axis = disc.size() == 2 ? disc.nodes().front() : BlochVector{0, 0, 1};
    return covariant_pair_exponent(p, axis, -axis);
}

/// Chernoff exponent -(1/2) ln(1 - r^2) of a Stern-Gerlach detector with purity r.
inline double noisy_sg_zeta(double r) {
    if (!(r >= 0 && r <= 1)) {
        throw DomainError("purity r must lie in [0, 1]");
    }
    if (r == 1) {
        return kInf;
    }
    return -0.5 * std::log1p(-r * r);
}

/// The purity r = sqrt(1 - e^{-2 zeta}) whose Stern-Gerlach detector has exponent zeta.
inline double equivalent_sg_purity(double zeta) {
    if (!(zeta >= 0)) {
        throw DomainError("exponent must be nonnegative");
    }
    if (std::isinf(zeta)) {
        return 1.0;
    }
    return std::sqrt(-std::expm1(-2 * zeta));
}

namespace detail {

inline void require_commuting_pair(double p, double q) {
    if (!(p < 1 && q > 0 && p >= q)) {
        throw DomainError("need 1 > p > q > 0");
    }
}

/// Binary relative entropy D(a || b).
inline double binary_relative_entropy(double a, double b) {
    double pa[] = {a, 1 - a};
    double pb[] = {b, 1 - b};
    return relative_entropy(pa, pb);
}

}  // namespace detail

/// Crossover type gamma where D(gamma || p) = D(gamma || q) for the binary
/// pair (p, 1-p) vs (q, 1-q). DomainError outside 1 > p > q > 0, including
/// the degenerate p = q where the detector is useless.
inline double commuting_gamma(double p, double q) {
    detail::require_commuting_pair(p, q);
    if (p == q) {
        throw DomainError("p = q: the detector cannot discriminate, gamma is undefined");
    }
    double l1 = std::log((1 - q) / (1 - p));
    double l2 = std::log(p / q);
    return l1 / (l1 + l2);
}

/// D(gamma || p), the Chernoff exponent of the binary pair. Zero at p = q,
/// the continuous limit.
inline double commuting_zeta(double p, double q) {
    detail::require_commuting_pair(p, q);
    if (p == q) {
        return 0.0;
    }
    return detail::binary_relative_entropy(commuting_gamma(p, q), p);
}

/// C = exp(-zeta_CB) of a detector, via the state optimizer.
inline double c_functional(const Povm &p, const SearchOptions &opts = {}) {
    return std::exp(-zeta_chernoff(p, opts).value);
}

struct MixingBounds {
    double lower = 0;
    double upper = 0;
    double p = 0;
};

namespace detail {

inline void require_weight(double p) {
    if (!(p >= 0 && p <= 1)) {
        throw DomainError("mixing weight must lie in [0, 1]");
    }
}

inline void require_exponent(double z) {
    if (!(z >= 0)) {
        throw DomainError("exponents must be nonnegative");
    }
}

}  // namespace detail

/// Chernoff bounds for the mixture that runs E with probability p and G otherwise:
/// -ln min{p cE + 1 - p, p + (1-p) cG} <= zeta <= p zE + (1-p) zG.
/// Each (c, z) pair must satisfy z = -ln c within 1e-9.
inline MixingBounds mixing_bounds(double c_e, double c_g, double z_e, double z_g, double p) {
    detail::require_weight(p);
    for (auto [c, z] : {std::pair{c_e, z_e}, std::pair{c_g, z_g}}) {
        if (!(c > 0 && c <= 1)) {
            throw DomainError("C must lie in (0, 1]");
        }
        if (!(std::abs(z + std::log(c)) <= 1e-9)) {
            throw DomainError("inconsistent inputs: zeta != -ln C");
        }
    }
    double lower = -std::log(std::min(p * c_e + (1 - p), p + (1 - p) * c_g));
    double upper = p * z_e + (1 - p) * z_g;
    return {lower, upper, p};
}

/// Stein bounds for the same mixture: max{p zE, (1-p) zG} <= zeta <= p zE + (1-p) zG.
inline MixingBounds stein_mixing_bounds(double z_e, double z_g, double p) {
    detail::require_weight(p);
    detail::require_exponent(z_e);
    detail::require_exponent(z_g);
    return {std::max(p * z_e, (1 - p) * z_g), p * z_e + (1 - p) * z_g, p};
}

/// Hoeffding upper bound p zE + (1-p) zG for the mixture. No lower bound is offered.
inline double hoeffding_mixing_upper(double z_e, double z_g, double p) {
    detail::require_weight(p);
    detail::require_exponent(z_e);
    detail::require_exponent(z_g);
    return p * z_e + (1 - p) * z_g;
}

/// The detector that runs E with probability p and G otherwise:
/// {p E_1, ..., p E_m, (1-p) G_1, ..., (1-p) G_k}.
inline Povm mix_povms(const Povm &e, const Povm &g, double p) {
    detail::require_weight(p);
    if (e.dim() != g.dim()) {
        throw StructuralError("mixed POVMs must act on the same space");
    }
    std::vector<ComplexMatrix> els;
    for (const auto &x : e.elements()) {
        els.push_back(p * x);
    }
    for (const auto &x : g.elements()) {
        els.push_back((1 - p) * x);
    }
    return Povm(std::move(els));
}

/// Exponent of a diagonal detector, maximized over ordered pairs of distinct
/// computational basis states. UnsupportedError if an element is off-diagonal.
inline double diagonal_exponent(const Povm &p, const Objective &obj) {
    require_valid(p);
    const std::size_t d = p.dim();
    for (const auto &e : p.elements()) {
        for (std::size_t i = 0; i < d; i++) {
            for (std::size_t j = 0; j < d; j++) {
                if (i != j && e(i, j) != Complex(0)) {
                    throw UnsupportedError("basis-pair exponent needs diagonal POVM elements");
                }
            }
        }
    }
    std::vector<std::vector<double>> rows(d, std::vector<double>(p.size()));
    for (std::size_t i = 0; i < d; i++) {
        for (std::size_t k = 0; k < p.size(); k++) {
            rows[i][k] = std::max(0.0, p[k](i, i).real());
        }
    }
    double best = 0;
    for (std::size_t i = 0; i < d; i++) {
        for (std::size_t j = 0; j < d; j++) {
            if (i != j) {
                best = std::max(best, obj.exact(rows[i], rows[j]).value);
            }
        }
    }
    return best;
}

}  // namespace detpower

#endif
