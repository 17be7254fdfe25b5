#include "nekpart/json_io.hpp"

#include <fstream>
#include <stdexcept>

#include <fmt/format.h>

namespace nekpart {

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const json& config) { return fmt::format("{:016x}", fnv1a(config.dump())); }

json curve_to_json(const SWCurve& C) {
    return json{{"r", C.r()}, {"coeffs", C.coeffs}, {"lambda", C.lambda_scale}};
}

SWCurve curve_from_json(const json& j) {
    if (!j.is_object() || !j.contains("coeffs") || !j.contains("lambda"))
        throw std::invalid_argument("curve JSON needs \"coeffs\" and \"lambda\"");
    SWCurve C{j.at("coeffs").get<std::vector<double>>(), j.at("lambda").get<double>()};
    if (j.contains("r") && j.at("r").get<int>() != C.r())
        throw std::invalid_argument("curve JSON: r does not match the number of coefficients");
    C.validate();
    return C;
}

json plane_curve_to_json(const PlaneCurve& P) {
    json out = json::array();
    for (const auto& m : P.monomials()) out.push_back(json::array({m.i, m.j, m.coeff}));
    return out;
}

PlaneCurve plane_curve_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("plane curve JSON must be an array of [i, j, c]");
    std::vector<Monomial> m;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 3) throw std::invalid_argument("plane curve entry must be [i, j, c]");
        m.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    return PlaneCurve(m);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument(fmt::format("cannot open {}", path));
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(fmt::format("{}: {}", path, e.what()));
    }
}

void write_csv(const std::string& path, const std::string& hash, const json& tolerances,
               const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path));
    out << "# config_hash=" << hash << "\n# tolerances=" << tolerances.dump() << "\n";
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_real(row[k]);
        out << "\n";
    }
}

void write_json(const std::string& path, const std::string& hash, const json& tolerances, json body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path));
    json doc{{"config_hash", hash}, {"tolerances", tolerances}};
    for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
    out << doc.dump(2) << "\n";
}

}  // namespace nekpart
