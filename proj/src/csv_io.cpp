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

#include "nfbeam/csv_io.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include <json.hpp>

namespace nfbeam::csv
{

std::string format_double(double value)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::general, 9);
    return std::string(buf.data(), res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : bytes)
    {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t value)
{
    static const char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i)
    {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string to_csv(const experiments::RateCurve &curve)
{
    std::string out = "# artifact=rate_curve architecture=" + curve.architecture +
                      " users=" + std::to_string(curve.rates.n_cols) + "\n";
    out += "z_m";
    for (std::size_t m = 0; m < curve.rates.n_cols; ++m)
        out += ",user" + std::to_string(m + 1) + "_bps_hz";
    out += "\n";
    for (std::size_t k = 0; k < curve.axis.size(); ++k)
    {
        out += format_double(curve.axis[k]);
        for (std::size_t m = 0; m < curve.rates.n_cols; ++m)
            out += "," + format_double(curve.rates(k, m));
        out += "\n";
    }
    return out;
}

std::string to_csv(const std::vector<experiments::PowerMap> &maps)
{
    std::string out = "# artifact=power_map";
    if (!maps.empty())
        out += " architecture=" + maps.front().architecture +
               " users=" + std::to_string(maps.size()) +
               " grid=" + std::to_string(maps.front().z.size()) + "x" +
               std::to_string(maps.front().x.size());
    out += "\nuser,x_m,z_m,normalized_power\n";
    for (const experiments::PowerMap &map : maps)
        for (std::size_t k = 0; k < map.z.size(); ++k)
            for (std::size_t i = 0; i < map.x.size(); ++i)
                out += std::to_string(map.user_index + 1) + "," + format_double(map.x[i]) +
                       "," + format_double(map.z[k]) + "," + format_double(map.values(k, i)) +
                       "\n";
    return out;
}

std::string to_csv(const experiments::SweepTable &table)
{
    std::string out = "# artifact=sum_rate_table\nm_users";
    for (const std::string &label : table.architectures)
        out += "," + label + "_bps_hz";
    out += "\n";
    for (std::size_t ci = 0; ci < table.user_counts.size(); ++ci)
    {
        out += std::to_string(table.user_counts[ci]);
        for (std::size_t ai = 0; ai < table.architectures.size(); ++ai)
            out += "," + format_double(table.sum_rates(ci, ai));
        out += "\n";
    }
    return out;
}

void write_file(const std::string &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.good())
        throw IoError("failed writing '" + path + "'");
}

void emit_csv(const experiments::RateCurve &curve, const std::string &path)
{
    write_file(path, to_csv(curve));
}

void emit_csv(const std::vector<experiments::PowerMap> &maps, const std::string &path)
{
    write_file(path, to_csv(maps));
}

void emit_csv(const experiments::SweepTable &table, const std::string &path)
{
    write_file(path, to_csv(table));
}

std::string run_manifest(const scenario::Scenario &sc, std::uint64_t seed,
                         const std::vector<std::string> &artifact_paths)
{
    const std::string canonical = scenario::canonical_json(sc);
    nlohmann::json manifest;
    manifest["artifacts"] = artifact_paths;
    manifest["scenario"] = nlohmann::json::parse(canonical);
    manifest["scenario_hash"] = hex64(fnv1a64(canonical));
    manifest["seed"] = seed;
    manifest["tool"] = "nfbeam";
    manifest["version"] = "1.0.0";
    return manifest.dump(2) + "\n";
}

void emit_report(const scenario::Scenario &sc, std::uint64_t seed,
                 const std::vector<std::string> &artifact_paths, const std::string &path)
{
    write_file(path, run_manifest(sc, seed, artifact_paths));
}

} // namespace nfbeam::csv
