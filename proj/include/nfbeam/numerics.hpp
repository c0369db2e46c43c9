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

#ifndef NFBEAM_NUMERICS_HPP
#define NFBEAM_NUMERICS_HPP

#include <complex>

#include <armadillo>

#include "nfbeam/errors.hpp"

namespace nfbeam::numerics
{

// Dense column-major complex linear algebra is delegated to Armadillo;
// these aliases are the vocabulary types of every solver in the library.
using ComplexMatrix = arma::cx_mat;
using ComplexVector = arma::cx_vec;
using Complex = std::complex<double>;

// Kronecker product a (x) b; (i,j) block of the result is a(i,j) * b.
ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

// Column-major vectorization: stacks the columns of m top to bottom.
ComplexVector vec(const ComplexMatrix &m);

// Frobenius norm, sqrt(sum of squared entry magnitudes).
double frobenius_norm(const ComplexMatrix &m);

// Solves a * x = rhs for Hermitian positive-definite a via an unpivoted
// Cholesky factorization with one step of iterative refinement.
// Throws SingularMatrix when a pivot falls below 1e-14 times the largest
// absolute entry of a (matrix singular or indefinite at working precision).
ComplexVector hermitian_solve(const ComplexMatrix &a, const ComplexVector &rhs);

// Multi-RHS variant; factors once and solves column by column.
ComplexMatrix hermitian_solve(const ComplexMatrix &a, const ComplexMatrix &rhs);

} // namespace nfbeam::numerics

#endif
