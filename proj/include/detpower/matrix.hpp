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

#ifndef DETPOWER_MATRIX_HPP
#define DETPOWER_MATRIX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "detpower/error.hpp"

namespace detpower {

using Complex = std::complex<double>;

/// Entrywise tolerances shared by every validation in the library.
namespace tol {
inline constexpr double herm = 1e-9;
inline constexpr double trace = 1e-9;
inline constexpr double psd = 1e-10;
inline constexpr double complete = 1e-9;
}  // namespace tol

/// Dense square complex matrix, row-major.
class ComplexMatrix {
   public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
        if (dim == 0) {
            throw StructuralError("matrix dimension must be positive");
        }
    }

    ComplexMatrix(std::size_t dim, std::vector<Complex> entries) : dim_(dim), data_(std::move(entries)) {
        if (dim == 0 || data_.size() != dim * dim) {
            throw StructuralError("matrix entries do not form a square dim x dim array");
        }
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) : dim_(rows.size()) {
        if (dim_ == 0) {
            throw StructuralError("matrix dimension must be positive");
        }
        data_.reserve(dim_ * dim_);
        for (const auto &row : rows) {
            if (row.size() != dim_) {
                throw StructuralError("matrix rows must all have length dim");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; i++) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size());
        for (std::size_t i = 0; i < values.size(); i++) {
            m(i, i) = values[i];
        }
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<double> values) {
        return diagonal(std::span<const double>(values.begin(), values.size()));
    }

    /// |v><v|
    static ComplexMatrix outer(std::span<const Complex> v) {
        ComplexMatrix m(v.size());
        for (std::size_t i = 0; i < v.size(); i++) {
            for (std::size_t j = 0; j < v.size(); j++) {
                m(i, j) = v[i] * std::conj(v[j]);
            }
        }
        return m;
    }

    std::size_t dim() const { return dim_; }
    std::span<const Complex> entries() const { return data_; }

    Complex &operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Complex &operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    Complex trace() const {
        Complex t = 0;
        for (std::size_t i = 0; i < dim_; i++) {
            t += (*this)(i, i);
        }
        return t;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix m(dim_);
        for (std::size_t i = 0; i < dim_; i++) {
            for (std::size_t j = 0; j < dim_; j++) {
                m(i, j) = std::conj((*this)(j, i));
            }
        }
        return m;
    }

    /// Largest entrywise modulus.
    double max_abs() const {
        double r = 0;
        for (const auto &z : data_) {
            r = std::max(r, std::abs(z));
        }
        return r;
    }

    /// max_ij |m_ij - conj(m_ji)|
    double hermiticity_deviation() const {
        double r = 0;
        for (std::size_t i = 0; i < dim_; i++) {
            for (std::size_t j = i; j < dim_; j++) {
                r = std::max(r, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
            }
        }
        return r;
    }

    bool is_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](const Complex &z) {
            return std::isfinite(z.real()) && std::isfinite(z.imag());
        });
    }

    ComplexMatrix &operator+=(const ComplexMatrix &o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < data_.size(); i++) {
            data_[i] += o.data_[i];
        }
        return *this;
    }
    ComplexMatrix &operator-=(const ComplexMatrix &o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < data_.size(); i++) {
            data_[i] -= o.data_[i];
        }
        return *this;
    }
    ComplexMatrix &operator*=(Complex s) {
        for (auto &z : data_) {
            z *= s;
        }
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
        a.require_same_dim(b);
        std::size_t d = a.dim_;
        ComplexMatrix m(d);
        for (std::size_t i = 0; i < d; i++) {
            for (std::size_t k = 0; k < d; k++) {
                Complex aik = a(i, k);
                if (aik == Complex(0)) {
                    continue;
                }
                for (std::size_t j = 0; j < d; j++) {
                    m(i, j) += aik * b(k, j);
                }
            }
        }
        return m;
    }

    friend bool operator==(const ComplexMatrix &, const ComplexMatrix &) = default;

   private:
    void require_same_dim(const ComplexMatrix &o) const {
        if (o.dim_ != dim_) {
            throw StructuralError("matrix dimension mismatch");
        }
    }

    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

/// tr(a b) without forming the product.
inline Complex trace_of_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.dim() != b.dim()) {
        throw StructuralError("matrix dimension mismatch");
    }
    Complex t = 0;
    for (std::size_t i = 0; i < a.dim(); i++) {
        for (std::size_t j = 0; j < a.dim(); j++) {
            t += a(i, j) * b(j, i);
        }
    }
    return t;
}

/// <v|m|v>
inline Complex expectation(const ComplexMatrix &m, std::span<const Complex> v) {
    if (m.dim() != v.size()) {
        throw StructuralError("vector length does not match matrix dimension");
    }
    Complex t = 0;
    for (std::size_t i = 0; i < v.size(); i++) {
        Complex row = 0;
        for (std::size_t j = 0; j < v.size(); j++) {
            row += m(i, j) * v[j];
        }
        t += std::conj(v[i]) * row;
    }
    return t;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    std::size_t da = a.dim();
    std::size_t db = b.dim();
    ComplexMatrix m(da * db);
    for (std::size_t i = 0; i < da; i++) {
        for (std::size_t j = 0; j < da; j++) {
            Complex aij = a(i, j);
            if (aij == Complex(0)) {
                continue;
            }
            for (std::size_t k = 0; k < db; k++) {
                for (std::size_t l = 0; l < db; l++) {
                    m(i * db + k, j * db + l) = aij * b(k, l);
                }
            }
        }
    }
    return m;
}

/// Entrywise max-norm distance.
inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) { return (a - b).max_abs(); }

}  // namespace detpower

#endif
