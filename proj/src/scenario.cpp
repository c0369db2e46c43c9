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

#include "nfbeam/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nfbeam::scenario
{

namespace
{

using nlohmann::json;

void require_keys(const json &obj, const std::set<std::string> &known, const std::string &where)
{
    for (const auto &item : obj.items())
        if (known.find(item.key()) == known.end())
            throw ValidationError("scenario: unknown field '" + where + item.key() + "'");
}

double take_number(const json &obj, const std::string &key, double fallback,
                   const std::string &where = "")
{
    if (!obj.contains(key))
        return fallback;
    const json &v = obj.at(key);
    if (!v.is_number())
        throw ParseError("scenario: field '" + where + key + "' must be a number");
    return v.get<double>();
}

std::size_t take_count(const json &obj, const std::string &key, std::size_t fallback,
                       const std::string &where = "")
{
    if (!obj.contains(key))
        return fallback;
    const json &v = obj.at(key);
    if (!v.is_number_unsigned())
        throw ParseError("scenario: field '" + where + key +
                         "' must be a nonnegative integer");
    return v.get<std::size_t>();
}

std::string take_string(const json &obj, const std::string &key, const std::string &fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json &v = obj.at(key);
    if (!v.is_string())
        throw ParseError("scenario: field '" + key + "' must be a string");
    return v.get<std::string>();
}

void check_positive(double value, const std::string &field)
{
    if (!(value > 0.0))
        throw ValidationError("scenario: field '" + field + "' must be positive");
}

} // namespace

double dbm_to_watts(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

Scenario parse_scenario(const std::string &text)
{
    json root;
    try
    {
        root = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    if (!root.is_object())
        throw ParseError("scenario: top level must be an object");

    require_keys(root, {"name", "carrier_frequency_hz", "antenna_length_m",
                        "boresight_exponent", "p_max_dbm", "p_max_watts", "noise_dbm",
                        "noise_watts", "architecture", "n_rf", "digital_spacing_wavelengths",
                        "dma", "users", "outputs", "solvers"},
                 "");

    Scenario sc;
    sc.name = take_string(root, "name", sc.name);
    sc.carrier_frequency = take_number(root, "carrier_frequency_hz", sc.carrier_frequency);
    sc.antenna_length = take_number(root, "antenna_length_m", sc.antenna_length);
    sc.boresight_b = take_number(root, "boresight_exponent", sc.boresight_b);
    sc.architecture = take_string(root, "architecture", sc.architecture);
    sc.n_rf = take_count(root, "n_rf", sc.n_rf);
    sc.digital_spacing_wavelengths =
        take_number(root, "digital_spacing_wavelengths", sc.digital_spacing_wavelengths);

    // Powers: linear watts win over dBm when both appear; dBm is converted
    // here and nowhere else.
    if (root.contains("p_max_watts"))
    {
        sc.p_max = take_number(root, "p_max_watts", 0.0);
        check_positive(sc.p_max, "p_max_watts");
    }
    else
        sc.p_max = dbm_to_watts(take_number(root, "p_max_dbm", -13.0));
    if (root.contains("noise_watts"))
    {
        sc.noise_power = take_number(root, "noise_watts", 0.0);
        check_positive(sc.noise_power, "noise_watts");
    }
    else
        sc.noise_power = dbm_to_watts(take_number(root, "noise_dbm", -114.0));

    if (root.contains("dma"))
    {
        const json &d = root.at("dma");
        if (!d.is_object())
            throw ParseError("scenario: field 'dma' must be an object");
        require_keys(d, {"alpha_per_m", "beta_per_m", "column_spacing_wavelengths"}, "dma.");
        sc.dma_alpha = take_number(d, "alpha_per_m", sc.dma_alpha, "dma.");
        sc.dma_beta = take_number(d, "beta_per_m", sc.dma_beta, "dma.");
        sc.dma_column_spacing_wavelengths =
            take_number(d, "column_spacing_wavelengths", sc.dma_column_spacing_wavelengths,
                        "dma.");
    }

    if (!root.contains("users"))
        throw ParseError("scenario: missing required field 'users'");
    const json &users = root.at("users");
    if (!users.is_array() || users.empty())
        throw ValidationError("scenario: field 'users' must be a non-empty array");
    for (std::size_t k = 0; k < users.size(); ++k)
    {
        const json &u = users.at(k);
        const std::string where = "users[" + std::to_string(k) + "].";
        if (!u.is_object())
            throw ParseError("scenario: field 'users[" + std::to_string(k) +
                             "]' must be an object");
        require_keys(u, {"x_m", "y_m", "z_m"}, where);
        if (!u.contains("z_m"))
            throw ParseError("scenario: missing required field '" + where + "z_m'");
        channel::User user;
        user.position.x = take_number(u, "x_m", 0.0, where);
        user.position.y = take_number(u, "y_m", 0.0, where);
        user.position.z = take_number(u, "z_m", 0.0, where);
        if (!(user.position.z > 0.0))
            throw ValidationError("scenario: field '" + where + "z_m' must be positive");
        sc.users.push_back(user);
    }

    if (root.contains("outputs"))
    {
        const json &outs = root.at("outputs");
        if (!outs.is_array())
            throw ParseError("scenario: field 'outputs' must be an array of strings");
        sc.outputs.clear();
        for (const json &o : outs)
        {
            if (!o.is_string())
                throw ParseError("scenario: field 'outputs' must be an array of strings");
            const std::string artifact = o.get<std::string>();
            if (artifact != "rate_curve" && artifact != "power_map" &&
                artifact != "sum_rate_table")
                throw ValidationError("scenario: field 'outputs' has unknown artifact '" +
                                      artifact + "'");
            sc.outputs.push_back(artifact);
        }
    }

    if (root.contains("solvers"))
    {
        const json &s = root.at("solvers");
        if (!s.is_object())
            throw ParseError("scenario: field 'solvers' must be an object");
        require_keys(s, {"wmmse", "hybrid", "dma"}, "solvers.");
        if (s.contains("wmmse"))
        {
            const json &w = s.at("wmmse");
            require_keys(w, {"max_iters", "tol"}, "solvers.wmmse.");
            sc.solvers.wmmse.max_iters =
                take_count(w, "max_iters", sc.solvers.wmmse.max_iters, "solvers.wmmse.");
            sc.solvers.wmmse.tol = take_number(w, "tol", sc.solvers.wmmse.tol, "solvers.wmmse.");
            check_positive(sc.solvers.wmmse.tol, "solvers.wmmse.tol");
        }
        if (s.contains("hybrid"))
        {
            const json &h = s.at("hybrid");
            require_keys(h, {"outer_rounds", "rcg_max_iters", "rcg_grad_tol"}, "solvers.hybrid.");
            sc.solvers.hybrid.outer_rounds =
                take_count(h, "outer_rounds", sc.solvers.hybrid.outer_rounds, "solvers.hybrid.");
            sc.solvers.hybrid.rcg.max_iters =
                take_count(h, "rcg_max_iters", sc.solvers.hybrid.rcg.max_iters,
                           "solvers.hybrid.");
            sc.solvers.hybrid.rcg.grad_tol =
                take_number(h, "rcg_grad_tol", sc.solvers.hybrid.rcg.grad_tol,
                            "solvers.hybrid.");
            check_positive(sc.solvers.hybrid.rcg.grad_tol, "solvers.hybrid.rcg_grad_tol");
        }
        if (s.contains("dma"))
        {
            const json &d = s.at("dma");
            require_keys(d, {"outer_rounds", "inner_iters", "inner_tol", "grid_points",
                             "refine_tol"},
                         "solvers.dma.");
            sc.solvers.dma.outer_rounds =
                take_count(d, "outer_rounds", sc.solvers.dma.outer_rounds, "solvers.dma.");
            sc.solvers.dma.inner_iters =
                take_count(d, "inner_iters", sc.solvers.dma.inner_iters, "solvers.dma.");
            sc.solvers.dma.inner_tol =
                take_number(d, "inner_tol", sc.solvers.dma.inner_tol, "solvers.dma.");
            sc.solvers.dma.grid_points =
                take_count(d, "grid_points", sc.solvers.dma.grid_points, "solvers.dma.");
            sc.solvers.dma.refine_tol =
                take_number(d, "refine_tol", sc.solvers.dma.refine_tol, "solvers.dma.");
            check_positive(sc.solvers.dma.inner_tol, "solvers.dma.inner_tol");
            check_positive(sc.solvers.dma.refine_tol, "solvers.dma.refine_tol");
            if (sc.solvers.dma.grid_points < 4)
                throw ValidationError(
                    "scenario: field 'solvers.dma.grid_points' must be at least 4");
        }
    }

    check_positive(sc.carrier_frequency, "carrier_frequency_hz");
    check_positive(sc.antenna_length, "antenna_length_m");
    if (sc.boresight_b < 0.0)
        throw ValidationError("scenario: field 'boresight_exponent' must be nonnegative");
    check_positive(sc.digital_spacing_wavelengths, "digital_spacing_wavelengths");
    check_positive(sc.dma_column_spacing_wavelengths, "dma.column_spacing_wavelengths");
    if (sc.dma_alpha < 0.0)
        throw ValidationError("scenario: field 'dma.alpha_per_m' must be nonnegative");
    check_positive(sc.dma_beta, "dma.beta_per_m");
    if (sc.architecture != "fd" && sc.architecture != "hybrid" && sc.architecture != "dma" &&
        sc.architecture != "all")
        throw ValidationError("scenario: field 'architecture' must be fd, hybrid, dma, or all");

    // The aperture must hold at least one element at each spacing.
    const double lambda = sc.wavelength();
    if (std::floor(sc.antenna_length / (sc.digital_spacing_wavelengths * lambda)) < 1.0)
        throw ValidationError("scenario: field 'antenna_length_m' is smaller than one "
                              "digital element spacing");
    if (std::floor(sc.antenna_length / (sc.dma_column_spacing_wavelengths * lambda)) < 1.0)
        throw ValidationError("scenario: field 'antenna_length_m' is smaller than one "
                              "metasurface element spacing");

    return sc;
}

Scenario load_scenario(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

std::string canonical_json(const Scenario &sc)
{
    json root;
    root["name"] = sc.name;
    root["carrier_frequency_hz"] = sc.carrier_frequency;
    root["antenna_length_m"] = sc.antenna_length;
    root["boresight_exponent"] = sc.boresight_b;
    root["p_max_watts"] = sc.p_max;
    root["noise_watts"] = sc.noise_power;
    root["architecture"] = sc.architecture;
    root["n_rf"] = sc.n_rf;
    root["digital_spacing_wavelengths"] = sc.digital_spacing_wavelengths;
    root["dma"] = {{"alpha_per_m", sc.dma_alpha},
                   {"beta_per_m", sc.dma_beta},
                   {"column_spacing_wavelengths", sc.dma_column_spacing_wavelengths}};
    json users = json::array();
    for (const channel::User &u : sc.users)
        users.push_back({{"x_m", u.position.x}, {"y_m", u.position.y}, {"z_m", u.position.z}});
    root["users"] = users;
    root["outputs"] = sc.outputs;
    root["solvers"] = {
        {"wmmse",
         {{"max_iters", sc.solvers.wmmse.max_iters}, {"tol", sc.solvers.wmmse.tol}}},
        {"hybrid",
         {{"outer_rounds", sc.solvers.hybrid.outer_rounds},
          {"rcg_max_iters", sc.solvers.hybrid.rcg.max_iters},
          {"rcg_grad_tol", sc.solvers.hybrid.rcg.grad_tol}}},
        {"dma",
         {{"outer_rounds", sc.solvers.dma.outer_rounds},
          {"inner_iters", sc.solvers.dma.inner_iters},
          {"inner_tol", sc.solvers.dma.inner_tol},
          {"grid_points", sc.solvers.dma.grid_points},
          {"refine_tol", sc.solvers.dma.refine_tol}}}};
    return root.dump();
}

} // namespace nfbeam::scenario
