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

#ifndef NFBEAM_ERRORS_HPP
#define NFBEAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nfbeam
{

// Physical or mathematical argument outside its valid domain
// (non-positive wavelength, negative power, out-of-range index, ...).
struct DomainError : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

// A linear system whose matrix is singular or numerically indefinite.
struct SingularMatrix : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// An iterative routine exhausted its budget without meeting its tolerance.
struct ConvergenceFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// A user placed (numerically) on top of an array element.
struct DegenerateGeometry : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// A retraction input with an entry too close to zero to normalize.
struct DegenerateRetraction : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Malformed input file (syntax level).
struct ParseError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Well-formed input with inconsistent or physically meaningless content.
struct ValidationError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// File-system level failure (missing file, unwritable output, ...).
struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

} // namespace nfbeam

#endif
