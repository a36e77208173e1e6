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

#ifndef DETPOWER_STATE_HPP
#define DETPOWER_STATE_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "detpower/eigen.hpp"
#include "detpower/matrix.hpp"

namespace detpower {

/// A validated quantum state: Hermitian, PSD and unit trace within tol::*.
class DensityMatrix {
   public:
    /// Throws DomainError if `m` is not a valid state.
    explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
        if (!mat_.is_finite()) {
            throw DomainError("density matrix has non-finite entries");
        }
        if (mat_.hermiticity_deviation() > tol::herm) {
            throw DomainError("density matrix is not Hermitian");
        }
        if (std::abs(mat_.trace() - Complex(1)) > tol::trace) {
            throw DomainError("density matrix trace differs from 1");
        }
        auto e = eig_hermitian(mat_);
        if (e.values.back() < -tol::psd) {
            throw DomainError("density matrix has a negative eigenvalue");
        }
    }

    /// |psi><psi| for a (not necessarily normalized) nonzero vector.
    static DensityMatrix pure(std::span<const Complex> psi) {
        double n2 = 0;
        for (const auto &z : psi) {
            n2 += std::norm(z);
        }
        if (!(n2 > 0) || !std::isfinite(n2)) {
            throw DomainError("pure state vector must be nonzero and finite");
        }
        auto m = ComplexMatrix::outer(psi);
        m *= Complex(1 / n2);
        return DensityMatrix(std::move(m), Unchecked{});
    }

    /// |i><i| in dimension d.
    static DensityMatrix basis(std::size_t d, std::size_t i) {
        if (i >= d) {
            throw DomainError("basis index out of range");
        }
        std::vector<Complex> v(d);
        v[i] = 1;
        return pure(v);
    }

    static DensityMatrix maximally_mixed(std::size_t d) {
        return DensityMatrix(ComplexMatrix::identity(d) * Complex(1.0 / static_cast<double>(d)), Unchecked{});
    }

    const ComplexMatrix &matrix() const { return mat_; }
    std::size_t dim() const { return mat_.dim(); }

    friend bool operator==(const DensityMatrix &, const DensityMatrix &) = default;

   private:
    struct Unchecked {};
    DensityMatrix(ComplexMatrix m, Unchecked) : mat_(std::move(m)) {}

    ComplexMatrix mat_;
};

struct BlochVector {
    double x = 0;
    double y = 0;
    double z = 0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    BlochVector operator-() const { return {-x, -y, -z}; }
};

/// (I + b . sigma) / 2. Throws DomainError when |b| > 1.
inline DensityMatrix bloch_to_density(const BlochVector &b) {
    if (!(b.norm() <= 1 + 1e-12)) {
        throw DomainError("Bloch vector norm exceeds 1");
    }
    ComplexMatrix m{{Complex(0.5 * (1 + b.z)), Complex(0.5 * b.x, -0.5 * b.y)},
                    {Complex(0.5 * b.x, 0.5 * b.y), Complex(0.5 * (1 - b.z))}};
    return DensityMatrix(std::move(m));
}

/// Inverse of bloch_to_density for qubit states.
inline BlochVector density_to_bloch(const DensityMatrix &rho) {
    if (rho.dim() != 2) {
        throw StructuralError("Bloch vectors exist only for qubits");
    }
    const auto &m = rho.matrix();
    return {2 * m(1, 0).real(), 2 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

}  // namespace detpower

#endif
