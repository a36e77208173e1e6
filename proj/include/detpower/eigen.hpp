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

#ifndef DETPOWER_EIGEN_HPP
#define DETPOWER_EIGEN_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "detpower/matrix.hpp"

namespace detpower {

struct EigenDecomposition {
    /// Descending.
    std::vector<double> values;
    /// Column j is the unit eigenvector for values[j].
    ComplexMatrix vectors;

    std::vector<Complex> vector(std::size_t j) const {
        std::vector<Complex> v(vectors.dim());
        for (std::size_t i = 0; i < v.size(); i++) {
            v[i] = vectors(i, j);
        }
        return v;
    }
};

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Pivots are visited in row-major (p < q) order every sweep, so the result is
/// bit-reproducible. Equal eigenvalues keep the order of the diagonal positions
/// they converged on. Throws DomainError if the input is not Hermitian within
/// tol::herm.
inline EigenDecomposition eig_hermitian(const ComplexMatrix &m) {
    if (!m.is_finite()) {
        throw DomainError("eig_hermitian: non-finite entries");
    }
    if (m.hermiticity_deviation() > tol::herm) {
        throw DomainError("eig_hermitian: matrix is not Hermitian");
    }
    const std::size_t d = m.dim();

    ComplexMatrix a = (m + m.adjoint()) * Complex(0.5);
    for (std::size_t i = 0; i < d; i++) {
        a(i, i) = a(i, i).real();
    }
    ComplexMatrix v = ComplexMatrix::identity(d);

    auto off_norm = [&] {
        double s = 0;
        for (std::size_t p = 0; p < d; p++) {
            for (std::size_t q = p + 1; q < d; q++) {
                s += std::norm(a(p, q));
            }
        }
        return std::sqrt(s);
    };
    const double scale = std::max(a.max_abs(), 1e-300);

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; sweep++) {
        if (off_norm() <= 1e-17 * scale) {
            break;
        }
        for (std::size_t p = 0; p < d; p++) {
            for (std::size_t q = p + 1; q < d; q++) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= 1e-300 || mag <= 1e-18 * scale) {
                    a(p, q) = 0;
                    a(q, p) = 0;
                    continue;
                }
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const Complex phase = apq / mag;

                // Real rotation zeroing |apq| after the phase has been absorbed into column q.
                const double theta = (aqq - app) / (2 * mag);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1);
                const double s = t * c;

                // U = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q).
                const Complex upp = c;
                const Complex upq = s;
                const Complex uqp = -s * std::conj(phase);
                const Complex uqq = c * std::conj(phase);

                for (std::size_t k = 0; k < d; k++) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * upp + akq * uqp;
                    a(k, q) = akp * upq + akq * uqq;
                }
                for (std::size_t k = 0; k < d; k++) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
                    a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
                }
                a(p, q) = 0;
                a(q, p) = 0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                for (std::size_t k = 0; k < d; k++) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * upp + vkq * uqp;
                    v(k, q) = vkp * upq + vkq * uqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    EigenDecomposition out{std::vector<double>(d), ComplexMatrix(d)};
    for (std::size_t j = 0; j < d; j++) {
        out.values[j] = a(order[j], order[j]).real();
        for (std::size_t i = 0; i < d; i++) {
            out.vectors(i, j) = v(i, order[j]);
        }
    }
    return out;
}

/// V diag(values) V^dagger
inline ComplexMatrix reconstruct(const EigenDecomposition &e) {
    const std::size_t d = e.vectors.dim();
    ComplexMatrix m(d);
    for (std::size_t i = 0; i < d; i++) {
        for (std::size_t j = 0; j < d; j++) {
            Complex s = 0;
            for (std::size_t k = 0; k < d; k++) {
                s += e.vectors(i, k) * e.values[k] * std::conj(e.vectors(j, k));
            }
            m(i, j) = s;
        }
    }
    return m;
}

}  // namespace detpower

#endif
