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

#ifndef DETPOWER_POVM_HPP
#define DETPOWER_POVM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "detpower/eigen.hpp"
#include "detpower/matrix.hpp"
#include "detpower/state.hpp"

namespace detpower {

/// Ordered measurement elements E_1..E_m on a common d-dimensional space.
///
/// Construction only checks shape; physical validity is reported by
/// validate_povm so that invalid devices can still be inspected.
class Povm {
   public:
    explicit Povm(std::vector<ComplexMatrix> elements) : elements_(std::move(elements)) {
        if (elements_.empty()) {
            throw StructuralError("POVM needs at least one element");
        }
        for (const auto &e : elements_) {
            if (e.dim() != elements_.front().dim()) {
                throw StructuralError("POVM elements have mismatched dimensions");
            }
        }
    }

    /// Diagonal POVM from per-element diagonals.
    static Povm diagonal(const std::vector<std::vector<double>> &diagonals) {
        std::vector<ComplexMatrix> els;
        els.reserve(diagonals.size());
        for (const auto &diag : diagonals) {
            els.push_back(ComplexMatrix::diagonal(diag));
        }
        return Povm(std::move(els));
    }

    std::size_t dim() const { return elements_.front().dim(); }
    std::size_t size() const { return elements_.size(); }
    const ComplexMatrix &operator[](std::size_t k) const { return elements_[k]; }
    std::span<const ComplexMatrix> elements() const { return elements_; }

   private:
    std::vector<ComplexMatrix> elements_;
};

/// U E_k U^dagger for every element.
inline Povm conjugate(const Povm &p, const ComplexMatrix &unitary) {
    std::vector<ComplexMatrix> els;
    auto udag = unitary.adjoint();
    for (const auto &e : p.elements()) {
        els.push_back(unitary * e * udag);
    }
    return Povm(std::move(els));
}

/// Two-outcome qubit POVM {(I + r Z)/2, (I - r Z)/2}.
inline Povm noisy_stern_gerlach(double r) {
    if (!(r >= 0 && r <= 1)) {
        throw DomainError("Stern-Gerlach purity must lie in [0, 1]");
    }
    return Povm::diagonal({{(1 + r) / 2, (1 - r) / 2}, {(1 - r) / 2, (1 + r) / 2}});
}

struct ElementReport {
    double hermiticity_deviation = 0;
    double min_eigenvalue = 0;
    bool is_zero = false;
    bool ok = true;
};

struct ValidationReport {
    bool valid = true;
    std::vector<ElementReport> elements;
    double completeness_residual = 0;
    std::vector<std::string> problems;
    std::vector<std::string> warnings;
};

/// Per-element Hermiticity/PSD deviations and the completeness residual
/// max|sum_k E_k - I|. Zero elements only raise a warning.
inline ValidationReport validate_povm(const Povm &p) {
    ValidationReport rep;
    const std::size_t d = p.dim();
    if (p.size() < 2) {
        rep.valid = false;
        rep.problems.push_back("a POVM needs at least 2 elements, got " + std::to_string(p.size()));
    }
    ComplexMatrix sum(d);
    for (std::size_t k = 0; k < p.size(); k++) {
        const auto &e = p[k];
        ElementReport er;
        if (!e.is_finite()) {
            er.ok = false;
            rep.valid = false;
            rep.problems.push_back("element " + std::to_string(k + 1) + " has non-finite entries");
            rep.elements.push_back(er);
            continue;
        }
        er.hermiticity_deviation = e.hermiticity_deviation();
        if (er.hermiticity_deviation > tol::herm) {
            er.ok = false;
            rep.problems.push_back("element " + std::to_string(k + 1) + " is not Hermitian");
        } else {
            er.min_eigenvalue = eig_hermitian(e).values.back();
            if (er.min_eigenvalue < -tol::psd) {
                er.ok = false;
                rep.problems.push_back("element " + std::to_string(k + 1) + " is not positive semidefinite");
            }
        }
        er.is_zero = e.max_abs() == 0;
        if (er.is_zero) {
            rep.warnings.push_back("element " + std::to_string(k + 1) + " is zero");
        }
        rep.valid = rep.valid && er.ok;
        rep.elements.push_back(er);
        sum += e;
    }
    rep.completeness_residual = max_abs_diff(sum, ComplexMatrix::identity(d));
    if (!std::isfinite(rep.completeness_residual) || rep.completeness_residual > tol::complete) {
        rep.valid = false;
        rep.problems.push_back("elements do not sum to the identity");
    }
    return rep;
}

/// Throws DomainError listing the first problem if `p` is not a valid POVM.
inline void require_valid(const Povm &p) {
    auto rep = validate_povm(p);
    if (!rep.valid) {
        throw DomainError("invalid POVM: " + rep.problems.front());
    }
}

/// Outcome subset as a bitmask over element indices (bit k = outcome k+1).
using OutcomeMask = std::uint64_t;

/// E^a = sum_{k in a} E_k
inline ComplexMatrix grouped_element(const Povm &p, OutcomeMask a) {
    ComplexMatrix g(p.dim());
    for (std::size_t k = 0; k < p.size() && k < 64; k++) {
        if ((a >> k) & 1) {
            g += p[k];
        }
    }
    return g;
}

/// Binary partition {a, a-bar} of outcomes (or outcome sequences). Index i is
/// in `a`, the set that accepts H0, iff accept[i].
struct GroupingMask {
    std::vector<bool> accept;

    std::size_t count() const { return static_cast<std::size_t>(std::count(accept.begin(), accept.end(), true)); }
    /// Empty or full: the test ignores the data.
    bool trivial() const { return count() == 0 || count() == accept.size(); }

    static GroupingMask from_bits(OutcomeMask bits, std::size_t m) {
        GroupingMask g{std::vector<bool>(m)};
        for (std::size_t k = 0; k < m && k < 64; k++) {
            g.accept[k] = (bits >> k) & 1;
        }
        return g;
    }

    friend bool operator==(const GroupingMask &, const GroupingMask &) = default;
};

/// Default cap on the product-space dimension d^n for operators on n slots.
inline constexpr std::size_t kDefaultProductDimCap = std::size_t{1} << 12;

/// d^n, or ResourceError if it exceeds `cap`.
inline std::size_t product_dim(std::size_t d, std::size_t n, std::size_t cap, const char *cap_name) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; i++) {
        if (total > cap / d) {
            throw ResourceError(cap_name, std::string(cap_name) + " exceeded: " + std::to_string(d) + "^" +
                                              std::to_string(n) + " > " + std::to_string(cap));
        }
        total *= d;
    }
    return total;
}

/// E_{k_1} (x) ... (x) E_{k_n}; outcome indices are 0-based.
inline ComplexMatrix sequence_operator(const Povm &p, std::span<const std::size_t> seq,
                                       std::size_t cap = kDefaultProductDimCap) {
    if (seq.empty()) {
        throw StructuralError("outcome sequence must be nonempty");
    }
    product_dim(p.dim(), seq.size(), cap, "product_dim_cap");
    for (auto k : seq) {
        if (k >= p.size()) {
            throw DomainError("outcome index out of range");
        }
    }
    ComplexMatrix out = p[seq[0]];
    for (std::size_t i = 1; i < seq.size(); i++) {
        out = kron(out, p[seq[i]]);
    }
    return out;
}

}  // namespace detpower

#endif
