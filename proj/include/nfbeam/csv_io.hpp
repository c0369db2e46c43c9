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

#ifndef NFBEAM_CSV_IO_HPP
#define NFBEAM_CSV_IO_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nfbeam/experiments.hpp"

namespace nfbeam::csv
{

// Shortest locale-independent decimal with 9 significant digits; the same
// bytes on every platform, which is what the determinism contract hangs on.
std::string format_double(double value);

// 64-bit FNV-1a over raw bytes; fingerprints scenarios in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Plot-ready artifacts with self-describing headers. An empty result yields
// the headers and nothing else.
std::string to_csv(const experiments::RateCurve &curve);
std::string to_csv(const std::vector<experiments::PowerMap> &maps);
std::string to_csv(const experiments::SweepTable &table);

void write_file(const std::string &path, const std::string &content); // IoError on failure

void emit_csv(const experiments::RateCurve &curve, const std::string &path);
void emit_csv(const std::vector<experiments::PowerMap> &maps, const std::string &path);
void emit_csv(const experiments::SweepTable &table, const std::string &path);

// JSON run manifest: resolved scenario, its fingerprint, the seed, artifact
// paths, and the tool version.
std::string run_manifest(const scenario::Scenario &sc, std::uint64_t seed,
                         const std::vector<std::string> &artifact_paths);
void emit_report(const scenario::Scenario &sc, std::uint64_t seed,
                 const std::vector<std::string> &artifact_paths, const std::string &path);

} // namespace nfbeam::csv

#endif
