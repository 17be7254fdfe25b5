#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nekpart/stepped.hpp"
#include "nekpart/swcurve.hpp"

namespace nekpart {

using json = nlohmann::ordered_json;

/// Seventeen significant digits, shortest form that round-trips.
std::string format_real(double v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);
/// Hash of the compact serialisation, as 16 hex digits.
std::string config_hash(const json& config);

/// {"r": r, "coeffs": [...], "lambda": Lambda}; coeffs highest degree first.
json curve_to_json(const SWCurve& C);
/// Throws std::invalid_argument on a malformed record.
SWCurve curve_from_json(const json& j);

/// [[i, j, c], ...]
json plane_curve_to_json(const PlaneCurve& P);
PlaneCurve plane_curve_from_json(const json& j);

json read_json_file(const std::string& path);

/// Writes CSV with two comment lines (config hash, tolerances) before the header row.
void write_csv(const std::string& path, const std::string& hash, const json& tolerances,
               const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

/// Writes pretty JSON; the body gains "config_hash" and "tolerances" fields.
void write_json(const std::string& path, const std::string& hash, const json& tolerances, json body);

}  // namespace nekpart
