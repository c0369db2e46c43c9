// SPDX-License-Identifier: Apache-2.0
//
// Copyright (c) 2026 nfbeam contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nfbeam/numerics.hpp"

#include <cmath>

namespace nfbeam::numerics
{

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b)
{
    return arma::kron(a, b);
}

ComplexVector vec(const ComplexMatrix &m)
{
    return arma::vectorise(m); // Armadillo storage is column-major
}

double frobenius_norm(const ComplexMatrix &m)
{
    if (m.n_elem == 0)
        return 0.0;
    return arma::norm(m, "fro");
}

namespace
{

// Unpivoted Cholesky a = L·Lᴴ with a relative pivot guard. The guard turns
// indefinite or rank-deficient inputs into a SingularMatrix error instead of
// silently producing NaN.
ComplexMatrix cholesky_lower(const ComplexMatrix &a)
{
    const arma::uword n = a.n_rows;
    if (n != a.n_cols)
        throw DomainError("hermitian_solve: matrix must be square, got " +
                          std::to_string(a.n_rows) + "x" + std::to_string(a.n_cols));

    const double threshold = 1e-14 * (n == 0 ? 0.0 : arma::abs(a).max());

    ComplexMatrix l(n, n, arma::fill::zeros);
    for (arma::uword j = 0; j < n; ++j)
    {
        double diag = a(j, j).real();
        for (arma::uword k = 0; k < j; ++k)
            diag -= std::norm(l(j, k));

        if (!(diag > threshold))
            throw SingularMatrix("hermitian_solve: pivot " + std::to_string(diag) +
                                 " at column " + std::to_string(j) +
                                 " below threshold " + std::to_string(threshold));

        const double root = std::sqrt(diag);
        l(j, j) = root;
        for (arma::uword i = j + 1; i < n; ++i)
        {
            Complex s = a(i, j);
            for (arma::uword k = 0; k < j; ++k)
                s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / root;
        }
    }
    return l;
}

ComplexVector forward_back_substitute(const ComplexMatrix &l, const ComplexVector &rhs)
{
    const arma::uword n = l.n_rows;

    ComplexVector y(n);
    for (arma::uword i = 0; i < n; ++i)
    {
        Complex s = rhs(i);
        for (arma::uword k = 0; k < i; ++k)
            s -= l(i, k) * y(k);
        y(i) = s / l(i, i);
    }

    ComplexVector x(n);
    for (arma::uword ii = n; ii > 0; --ii)
    {
        const arma::uword i = ii - 1;
        Complex s = y(i);
        for (arma::uword k = i + 1; k < n; ++k)
            s -= std::conj(l(k, i)) * x(k);
        x(i) = s / l(i, i);
    }
    return x;
}

} // namespace

ComplexVector hermitian_solve(const ComplexMatrix &a, const ComplexVector &rhs)
{
    if (a.n_rows != rhs.n_elem)
        throw DomainError("hermitian_solve: rhs length " + std::to_string(rhs.n_elem) +
                          " does not match matrix order " + std::to_string(a.n_rows));

    const ComplexMatrix l = cholesky_lower(a);
    ComplexVector x = forward_back_substitute(l, rhs);

    // One step of iterative refinement keeps the residual near rounding level
    // even when the factorization loses a few digits.
    const ComplexVector residual = rhs - a * x;
    x += forward_back_substitute(l, residual);
    return x;
}

ComplexMatrix hermitian_solve(const ComplexMatrix &a, const ComplexMatrix &rhs)
{
    if (a.n_rows != rhs.n_rows)
        throw DomainError("hermitian_solve: rhs rows " + std::to_string(rhs.n_rows) +
                          " do not match matrix order " + std::to_string(a.n_rows));

    const ComplexMatrix l = cholesky_lower(a);
    ComplexMatrix x(arma::size(rhs));
    for (arma::uword j = 0; j < rhs.n_cols; ++j)
    {
        ComplexVector xj = forward_back_substitute(l, rhs.col(j));
        const ComplexVector residual = rhs.col(j) - a * xj;
        xj += forward_back_substitute(l, residual);
        x.col(j) = xj;
    }
    return x;
}

} // namespace nfbeam::numerics
