#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nekpart/json_io.hpp"

using namespace nekpart;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("reals round trip through 17 digits") {
    for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, 5e-324})
        CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
}

TEST_CASE("config hash") {
    const json a{{"r", 2}, {"eps", 0.5}};
    const json b{{"r", 2}, {"eps", 0.5000001}};
    CHECK(config_hash(a) == config_hash(a));
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a).size() == 16);
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("curve serialisation") {
    const SWCurve C{{1.0, 0.0, -3.5, 0.0}, 1.0};
    const auto back = curve_from_json(curve_to_json(C));
    CHECK(back.coeffs == C.coeffs);
    CHECK(back.lambda_scale == C.lambda_scale);
    CHECK_THROWS_AS(curve_from_json(json{{"coeffs", {1.0, 0.0}}}), std::invalid_argument);
    CHECK_THROWS_AS(curve_from_json(json{{"coeffs", {1.0, 1.0, 0.0}}, {"lambda", 1.0}}), std::invalid_argument);

    const auto P = PlaneCurve::line();
    const auto Q = plane_curve_from_json(plane_curve_to_json(P));
    CHECK(Q.monomials().size() == 3);
    CHECK(Q.coefficient(0, 0) == -1.0);
}

TEST_CASE("output headers") {
    const std::string csv = "json_io_test.csv", js = "json_io_test.json";
    const json tol{{"quadrature", 1e-13}};
    write_csv(csv, "0123456789abcdef", tol, {"x", "y"}, {{1.0, 0.1}, {2.0, -0.5}});
    const auto text = slurp(csv);
    CHECK(text.rfind("# config_hash=0123456789abcdef\n# tolerances={\"quadrature\":1e-13}\nx,y\n", 0) == 0);
    CHECK(text.find("0.10000000000000001") != std::string::npos);
    write_json(js, "0123456789abcdef", tol, json{{"value", 1.5}});
    const auto j = read_json_file(js);
    CHECK(j.at("config_hash") == "0123456789abcdef");
    CHECK(j.at("value") == 1.5);
    std::remove(csv.c_str());
    std::remove(js.c_str());
    CHECK_THROWS(read_json_file("does_not_exist.json"));
}
