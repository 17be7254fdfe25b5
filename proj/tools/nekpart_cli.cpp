#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "nekpart/barnes.hpp"
#include "nekpart/json_io.hpp"
#include "nekpart/limitshape.hpp"
#include "nekpart/mcmc.hpp"
#include "nekpart/nekrasov.hpp"
#include "nekpart/stepped.hpp"
#include "nekpart/swcurve.hpp"

using namespace nekpart;

namespace {

constexpr int kUsage = 2;
constexpr int kNumerical = 3;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Job {
    std::string command;
    json params = json::object();
    json tolerances = json::object();
    std::string output;
    int threads = 1;

    std::string hash() const { return config_hash(json{{"command", command}, {"params", params}, {"tolerances", tolerances}}); }
    std::string path(const std::string& suffix) const { return output + suffix; }
};

void require_positive(const json& tol) {
    for (auto it = tol.begin(); it != tol.end(); ++it)
        if (it.value().is_number() && !(it.value().get<double>() > 0.0))
            throw UsageError(fmt::format("tolerance {} must be positive", it.key()));
}

std::string svg_polyline(const std::vector<std::array<double, 2>>& pts, const std::string& color,
                         const std::function<std::array<double, 2>(double, double)>& map, bool dots = false) {
    std::string s;
    if (dots) {
        for (const auto& p : pts) {
            const auto q = map(p[0], p[1]);
            s += fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"1.2\" fill=\"{}\"/>\n", q[0], q[1], color);
        }
        return s;
    }
    s = fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"", color);
    for (const auto& p : pts) {
        const auto q = map(p[0], p[1]);
        s += fmt::format("{:.3f},{:.3f} ", q[0], q[1]);
    }
    return s + "\"/>\n";
}

void write_svg(const std::string& path, const std::string& hash,
               const std::vector<std::pair<std::vector<std::array<double, 2>>, std::string>>& lines,
               const std::vector<std::pair<std::vector<std::array<double, 2>>, std::string>>& dots) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto* group : {&lines, &dots})
        for (const auto& [pts, c] : *group)
            for (const auto& p : pts) {
                x0 = std::min(x0, p[0]);
                x1 = std::max(x1, p[0]);
                y0 = std::min(y0, p[1]);
                y1 = std::max(y1, p[1]);
            }
    const double W = 600, H = 600, pad = 20;
    const double sc = std::min((W - 2 * pad) / std::max(x1 - x0, 1e-12), (H - 2 * pad) / std::max(y1 - y0, 1e-12));
    auto map = [&](double x, double y) -> std::array<double, 2> { return {pad + (x - x0) * sc, H - pad - (y - y0) * sc}; };
    std::ofstream out(path);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path));
    out << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n", W, H);
    out << fmt::format("<!-- config_hash={} -->\n", hash);
    for (const auto& [pts, c] : lines) out << svg_polyline(pts, c, map);
    for (const auto& [pts, c] : dots) out << svg_polyline(pts, c, map, true);
    out << "</svg>\n";
}

std::vector<std::array<double, 2>> profile_points(const ProfileFunction& f, double pad) {
    std::vector<std::array<double, 2>> pts;
    const auto& b = f.breakpoints();
    if (b.empty()) return {{-pad, pad}, {0.0, 0.0}, {pad, pad}};
    pts.push_back({b.front() - pad, std::abs(b.front() - pad)});
    for (std::size_t k = 0; k < b.size(); ++k) pts.push_back({b[k], f.values()[k]});
    pts.push_back({b.back() + pad, std::abs(b.back() + pad)});
    return pts;
}

// ---- zinst

struct ZinstArgs {
    int r = 1;
    double eps = 1.0;
    double lambda = 1.0;
    int nmax = 8;
    std::vector<double> a;
};

int run_zinst(Job& job, const ZinstArgs& z) {
    GaugeParams g{z.eps, z.a.empty() ? std::vector<double>(static_cast<std::size_t>(z.r), 0.0) : z.a, z.lambda};
    if (g.r() != z.r) throw UsageError("--a must have r entries");
    job.params = {{"r", z.r}, {"eps", z.eps}, {"lambda", z.lambda}, {"nmax", z.nmax}, {"a", g.a}};
    const auto res = z_inst(g, z.nmax, job.threads);
    std::vector<std::vector<double>> rows;
    for (std::size_t n = 0; n < res.coefficients.size(); ++n) rows.push_back({static_cast<double>(n), res.coefficients[n]});
    write_csv(job.path(".csv"), job.hash(), job.tolerances, {"n", "coefficient"}, rows);
    json body{{"z_inst", res.value}, {"last_term", res.last_term}};
    if (z.r > 1) {
        const auto lp = log_z_pert(g);
        body["log_z_pert"] = {lp.real(), lp.imag()};
    }
    write_json(job.path(".json"), job.hash(), job.tolerances, body);
    fmt::print("{}\n", format_real(res.value));
    return 0;
}

// ---- dualz-check

struct DualzArgs {
    std::vector<double> xi{1.0, -1.0};
    std::vector<double> eps{0.5, 0.4};
    double lambda = 0.2;
    int size_max = 40;
    int radius = 6;
    int nmax = 12;
    double rel_target = 1e-4;
};

int run_dualz(Job& job, const DualzArgs& d) {
    job.params = {{"xi", d.xi}, {"eps", d.eps}, {"lambda", d.lambda}, {"size_max", d.size_max}, {"radius", d.radius}, {"nmax", d.nmax}};
    job.tolerances["relative_target"] = d.rel_target;
    require_positive(job.tolerances);
    const PeriodicPotential V(d.xi, 1e-9);
    json rows = json::array();
    bool ok = true;
    std::vector<std::vector<double>> csv;
    for (double e : d.eps) {
        const auto p = dual_z_partitions(V, e, d.lambda, d.size_max);
        const auto l = dual_z_lattice(V, e, d.lambda, d.radius, d.nmax, job.threads);
        const double diff = std::abs(p.value - l.value);
        const double rel = diff / std::abs(p.value);
        const bool pass = diff <= p.tail + l.tail || rel <= d.rel_target;
        ok = ok && pass;
        rows.push_back({{"eps", e},
                        {"partition_route", {p.value.real(), p.value.imag()}},
                        {"lattice_route", {l.value.real(), l.value.imag()}},
                        {"partition_tail", p.tail},
                        {"lattice_tail", l.tail},
                        {"difference", diff},
                        {"relative", rel},
                        {"pass", pass}});
        csv.push_back({e, p.value.real(), p.value.imag(), l.value.real(), l.value.imag(), diff, p.tail + l.tail});
    }
    write_csv(job.path(".csv"), job.hash(), job.tolerances,
              {"eps", "partition_re", "partition_im", "lattice_re", "lattice_im", "difference", "tails"}, csv);
    write_json(job.path(".json"), job.hash(), job.tolerances, {{"results", rows}, {"pass", ok}});
    fmt::print("{}\n", ok ? "agree" : "disagree");
    return ok ? 0 : kNumerical;
}

// ---- periods

int run_periods(Job& job, const std::string& curve_path) {
    const SWCurve C = curve_from_json(read_json_file(curve_path));
    job.params = {{"curve", curve_to_json(C)}};
    job.tolerances["quadrature"] = 1e-13;
    const auto bg = band_gap(C);
    QuadratureReport rep;
    const auto a = periods_a(C, 1e-13, &rep);
    const auto ad = periods_a_dual(C, 1e-13);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < C.r(); ++i) {
        const auto [lo, hi] = bg.band(i);
        rows.push_back({static_cast<double>(i + 1), lo, hi, a[static_cast<std::size_t>(i)], ad[static_cast<std::size_t>(i)]});
    }
    write_csv(job.path(".csv"), job.hash(), job.tolerances, {"band", "left", "right", "a", "a_dual"}, rows);
    write_json(job.path(".json"), job.hash(), job.tolerances,
               {{"maximal", bg.maximal}, {"endpoints", bg.endpoints}, {"a", a}, {"a_dual", ad},
                {"quadrature_nodes", rep.nodes}, {"quadrature_change", rep.change}});
    for (double v : a) fmt::print("{} ", format_real(v));
    fmt::print("\n");
    return 0;
}

// ---- prepotential

int run_prepotential(Job& job, const std::vector<double>& a, double lambda) {
    job.params = {{"a", a}, {"lambda", lambda}};
    job.tolerances["fit"] = FitOptions{}.tol;
    const auto ref = default_reference(a, lambda);
    const double F = prepotential(a, lambda, ref);
    const auto H = prepotential_hessian(a, lambda);
    json hess = json::array();
    for (Eigen::Index i = 0; i < H.hessian.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < H.hessian.cols(); ++j) row.push_back(H.hessian(i, j));
        hess.push_back(row);
    }
    std::vector<double> eig(H.eigenvalues.data(), H.eigenvalues.data() + H.eigenvalues.size());
    write_json(job.path(".json"), job.hash(), job.tolerances,
               {{"F", F}, {"reference_a", ref.a}, {"reference_value", ref.value}, {"hessian", hess},
                {"asymmetry", H.asymmetry}, {"eigenvalues", eig}});
    fmt::print("{}\n", format_real(F));
    return 0;
}

// ---- limitshape

struct LimitArgs {
    std::string curve;
    double spacing = 0.01;
    std::optional<double> eps;
    std::int64_t steps = 0;
    std::optional<std::uint64_t> seed;
};

int run_limitshape(Job& job, const LimitArgs& l) {
    const SWCurve C = curve_from_json(read_json_file(l.curve));
    const bool stochastic = l.eps.has_value() || l.steps > 0;
    if (stochastic && (!l.eps || l.steps <= 0)) throw UsageError("MCMC needs both --eps and --steps");
    if (stochastic != l.seed.has_value()) throw UsageError("--seed is required exactly when sampling");
    job.params = {{"curve", curve_to_json(C)}, {"spacing", l.spacing}};
    if (stochastic) job.params.update({{"eps", *l.eps}, {"steps", l.steps}, {"seed", *l.seed}});
    job.tolerances["spacing"] = l.spacing;
    require_positive(job.tolerances);

    const LimitShape shape(C);
    const ProfileFunction prof = shape.to_profile(l.spacing);
    const PeriodicPotential V = xi_from_gaps(C);
    const SurfaceTension S(V);
    const auto slack = slackness_check(shape, S);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < prof.breakpoints().size(); ++k) {
        const double x = prof.breakpoints()[k];
        rows.push_back({x, prof.values()[k], shape.psi_prime(x)});
    }
    write_csv(job.path(".csv"), job.hash(), job.tolerances, {"x", "psi", "psi_prime"}, rows);

    json body{{"xi", V.xi()},
              {"endpoints", shape.bands().endpoints},
              {"endpoint_psi", shape.endpoint_values()},
              {"action", slack.action_value},
              {"slackness", {{"c0", slack.c0}, {"band_residual", slack.band_residual},
                             {"gap_violation", slack.gap_violation}, {"gap_monotone", slack.gap_monotone}}}};
    std::vector<std::pair<std::vector<std::array<double, 2>>, std::string>> lines{{profile_points(prof, 0.5), "black"}};
    if (stochastic) {
        const std::int64_t burn = std::max<std::int64_t>(l.steps / 10, 1);
        const auto avg = mcmc_average(V, *l.eps, C.lambda_scale, burn, l.steps - burn,
                                      std::max<std::int64_t>((l.steps - burn) / 10000, 1), *l.seed);
        body["mcmc"] = {{"l1_distance", l1_distance(avg.profile, prof)}, {"mean_size", avg.mean_size},
                        {"samples", avg.samples}, {"acceptance", avg.acceptance}};
        lines.push_back({profile_points(avg.profile, 0.5), "red"});
    }
    write_json(job.path(".json"), job.hash(), job.tolerances, body);
    write_svg(job.path(".svg"), job.hash(), lines, {});
    fmt::print("{}\n", format_real(slack.action_value));
    return 0;
}

// ---- legendre

int run_legendre(Job& job, const std::vector<double>& xi, double lambda) {
    job.params = {{"xi", xi}, {"lambda", lambda}};
    job.tolerances["grid_step"] = 0.02;
    job.tolerances["fd_step"] = 1e-3;
    const auto rep = legendre_check(xi, lambda);
    write_json(job.path(".json"), job.hash(), job.tolerances,
               {{"action_route", rep.action_route}, {"prepotential_route", rep.prepotential_route}, {"gap", rep.gap},
                {"gradient_fd", rep.gradient_fd}, {"gradient_expected", rep.gradient_expected},
                {"gradient_rel_error", rep.gradient_rel_error}, {"a", rep.a}});
    fmt::print("{} {}\n", format_real(rep.action_route), format_real(rep.prepotential_route));
    return 0;
}

// ---- ronkin

struct RonkinArgs {
    std::string curve;
    double lo = -3.0;
    double hi = 3.0;
    int n = 31;
};

int run_ronkin(Job& job, const RonkinArgs& a) {
    const PlaneCurve P = a.curve.empty() ? PlaneCurve::line() : plane_curve_from_json(read_json_file(a.curve));
    if (a.n < 2 || !(a.hi > a.lo)) throw UsageError("grid needs n >= 2 and hi > lo");
    job.params = {{"curve", plane_curve_to_json(P)}, {"lo", a.lo}, {"hi", a.hi}, {"n", a.n}};
    job.tolerances["quadrature"] = 1e-12;
    std::vector<std::vector<double>> rows;
    for (int iy = 0; iy < a.n; ++iy)
        for (int ix = 0; ix < a.n; ++ix) {
            const double x = a.lo + (a.hi - a.lo) * ix / (a.n - 1);
            const double y = a.lo + (a.hi - a.lo) * iy / (a.n - 1);
            const auto g = ronkin_gradient(P, x, y);
            const auto m = amoeba_membership(P, x, y);
            rows.push_back({x, y, ronkin(P, x, y), g[0], g[1], m.member ? 1.0 : 0.0});
        }
    write_csv(job.path(".csv"), job.hash(), job.tolerances, {"x", "y", "R", "dRdx", "dRdy", "amoeba"}, rows);
    fmt::print("{}\n", rows.size());
    return 0;
}

// ---- burgers / frozen

struct StepConfig {
    Cardioid shape;
    double c = 1.0;
    Region region;
    int resolution = 200;
    int nx = 41;
    int ny = 41;
    Region height_region;
};

Region region_from_json(const json& j) {
    return {j.at("x0").get<double>(), j.at("x1").get<double>(), j.at("y0").get<double>(), j.at("y1").get<double>()};
}

json region_to_json(const Region& r) { return {{"x0", r.x0}, {"x1", r.x1}, {"y0", r.y0}, {"y1", r.y1}}; }

StepConfig read_step_config(const std::string& path) {
    const json j = read_json_file(path);
    StepConfig s;
    try {
        const auto& cd = j.at("cardioid");
        s.shape = {cd.at("X0").get<double>(), cd.at("Y0").get<double>(), cd.at("rho").get<double>(),
                   cd.value("angle", 0.0)};
        s.c = j.value("c", 1.0);
        s.region = region_from_json(j.at("region"));
        s.resolution = j.value("resolution", 200);
        s.nx = j.value("nx", 41);
        s.ny = j.value("ny", 41);
        s.height_region = j.contains("height_region") ? region_from_json(j.at("height_region")) : s.region;
    } catch (const json::exception& e) {
        throw UsageError(fmt::format("{}: {}", path, e.what()));
    }
    if (!(s.shape.rho > 0.0) || !(s.c > 0.0)) throw UsageError("rho and c must be positive");
    return s;
}

json step_params(const StepConfig& s) {
    return {{"cardioid", {{"X0", s.shape.X0}, {"Y0", s.shape.Y0}, {"rho", s.shape.rho}, {"angle", s.shape.angle}}},
            {"c", s.c},
            {"region", region_to_json(s.region)},
            {"resolution", s.resolution},
            {"nx", s.nx},
            {"ny", s.ny},
            {"height_region", region_to_json(s.height_region)}};
}

int run_burgers(Job& job, const std::string& config) {
    const StepConfig s = read_step_config(config);
    job.params = step_params(s);
    job.tolerances["curl"] = 1e-4;
    const BurgersData B = cardioid_configuration(s.shape, s.c);
    const auto H = burgers_height(B, s.height_region, s.nx, s.ny, 1e-4, job.threads);
    std::vector<std::vector<double>> rows;
    for (int iy = 0; iy < H.ny; ++iy)
        for (int ix = 0; ix < H.nx; ++ix) {
            const auto k = static_cast<std::size_t>(iy * H.nx + ix);
            const double x = H.region.x0 + (H.region.x1 - H.region.x0) * ix / (H.nx - 1);
            const double y = H.region.y0 + (H.region.y1 - H.region.y0) * iy / (H.ny - 1);
            rows.push_back({x, y, H.h[k], H.grad[k][0], H.grad[k][1], H.liquid[k] ? 1.0 : 0.0});
        }
    write_csv(job.path(".csv"), job.hash(), job.tolerances, {"x", "y", "h", "hx", "hy", "liquid"}, rows);
    write_json(job.path(".json"), job.hash(), job.tolerances,
               {{"Q", plane_curve_to_json(B.Q)}, {"curl_residual", H.curl_residual}});
    fmt::print("{}\n", format_real(H.curl_residual));
    return 0;
}

int run_frozen(Job& job, const std::string& config) {
    const StepConfig s = read_step_config(config);
    job.params = step_params(s);
    job.tolerances["triple_gap"] = 1e-4;
    const BurgersData B = cardioid_configuration(s.shape, s.c);
    const auto fb = frozen_boundary(B, s.region, s.resolution);
    std::vector<std::array<double, 2>> XY;
    std::vector<std::vector<double>> rows;
    for (const auto& p : fb.points) {
        XY.push_back({std::exp(s.c * p.x), std::exp(s.c * p.y)});
        rows.push_back({p.x, p.y, XY.back()[0], XY.back()[1], p.t, p.triple_gap});
    }
    write_csv(job.path(".csv"), job.hash(), job.tolerances, {"x", "y", "X", "Y", "t", "triple_gap"}, rows);
    json body{{"points", fb.points.size()}, {"failures", fb.failures}};
    json triples = json::array();
    for (const auto& tp : fb.triple_points)
        triples.push_back({{"x", tp.x}, {"y", tp.y}, {"X", std::exp(s.c * tp.x)}, {"Y", std::exp(s.c * tp.y)},
                           {"t", tp.t}, {"discriminant", tp.discriminant},
                           {"discriminant_gradient", tp.discriminant_gradient}, {"cusp", tp.cusp}});
    body["triple_points"] = triples;
    std::vector<std::pair<std::vector<std::array<double, 2>>, std::string>> lines;
    if (XY.size() >= 8) {
        const auto fit = fit_cardioid(XY);
        body["cardioid_fit"] = {{"X0", fit.shape.X0}, {"Y0", fit.shape.Y0}, {"rho", fit.shape.rho},
                                {"angle", fit.shape.angle}, {"max_residual", fit.max_residual}, {"scale", fit.scale}};
        std::vector<std::array<double, 2>> curve;
        for (int k = 0; k <= 720; ++k) curve.push_back(fit.shape.at(2.0 * M_PI * k / 720));
        lines.push_back({curve, "red"});
    }
    write_json(job.path(".json"), job.hash(), job.tolerances, body);
    write_svg(job.path(".svg"), job.hash(), lines, {{XY, "black"}});
    fmt::print("{}\n", fb.points.size());
    return 0;
}

void write_diag(const Job& job, const std::string& kind, const std::string& what, json extra = json::object()) {
    json body{{"error", kind}, {"message", what}, {"command", job.command}, {"params", job.params}};
    body.update(extra);
    try {
        write_json(job.path(".diag.json"), job.hash(), job.tolerances, body);
    } catch (const std::exception&) {
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nekrasov partition functions, limit shapes and stepped surfaces"};
    app.require_subcommand(1);
    Job job;
    app.add_option("-o,--output", job.output, "Output prefix")->default_val("nekpart_out");
    app.add_option("--threads", job.threads, "Worker threads")->default_val(1)->check(CLI::PositiveNumber);

    ZinstArgs za;
    auto* zinst = app.add_subcommand("zinst", "Instanton series");
    zinst->add_option("--r", za.r)->required()->check(CLI::PositiveNumber);
    zinst->add_option("--eps", za.eps)->required();
    zinst->add_option("--lambda", za.lambda)->required();
    zinst->add_option("--nmax", za.nmax)->required()->check(CLI::NonNegativeNumber);
    zinst->add_option("--a", za.a)->delimiter(',');

    DualzArgs da;
    auto* dualz = app.add_subcommand("dualz-check", "Compare the two routes to the dual partition function");
    dualz->add_option("--xi", da.xi)->delimiter(',')->required();
    dualz->add_option("--eps", da.eps)->delimiter(',')->required();
    dualz->add_option("--lambda", da.lambda)->required();
    dualz->add_option("--size-max", da.size_max)->default_val(40);
    dualz->add_option("--radius", da.radius)->default_val(6);
    dualz->add_option("--nmax", da.nmax)->default_val(12);
    dualz->add_option("--rel-target", da.rel_target)->default_val(1e-4);

    std::string curve_path;
    auto* periods = app.add_subcommand("periods", "Band structure and periods of a curve");
    periods->add_option("--curve", curve_path)->required()->check(CLI::ExistingFile);

    std::vector<double> pa;
    double plambda = 1.0;
    auto* prep = app.add_subcommand("prepotential", "Prepotential and its Hessian");
    prep->add_option("--a", pa)->delimiter(',')->required();
    prep->add_option("--lambda", plambda)->required();

    LimitArgs la;
    double eps_opt = 0.0;
    std::uint64_t seed_opt = 0;
    auto* limit = app.add_subcommand("limitshape", "Limit shape, action and optional MCMC overlay");
    limit->add_option("--curve", la.curve)->required()->check(CLI::ExistingFile);
    limit->add_option("--spacing", la.spacing)->default_val(0.01);
    auto* eps_flag = limit->add_option("--eps", eps_opt);
    limit->add_option("--steps", la.steps);
    auto* seed_flag = limit->add_option("--seed", seed_opt);

    std::vector<double> lxi;
    double llambda = 1.0;
    auto* leg = app.add_subcommand("legendre", "Legendre duality check");
    leg->add_option("--xi", lxi)->delimiter(',')->required();
    leg->add_option("--lambda", llambda)->required();

    RonkinArgs ra;
    auto* ron = app.add_subcommand("ronkin", "Ronkin function and amoeba on a grid");
    ron->add_option("--curve", ra.curve)->check(CLI::ExistingFile);
    ron->add_option("--lo", ra.lo)->default_val(-3.0);
    ron->add_option("--hi", ra.hi)->default_val(3.0);
    ron->add_option("--n", ra.n)->default_val(31);

    std::string step_config;
    auto* burg = app.add_subcommand("burgers", "Complex Burgers solution and height function");
    burg->add_option("--config", step_config)->required()->check(CLI::ExistingFile);
    auto* froz = app.add_subcommand("frozen", "Frozen boundary and triple points");
    froz->add_option("--config", step_config)->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    auto* sub = app.get_subcommands().front();
    job.command = sub->get_name();
    try {
        if (sub == zinst) return run_zinst(job, za);
        if (sub == dualz) return run_dualz(job, da);
        if (sub == periods) return run_periods(job, curve_path);
        if (sub == prep) return run_prepotential(job, pa, plambda);
        if (sub == limit) {
            if (eps_flag->count() > 0) la.eps = eps_opt;
            if (seed_flag->count() > 0) la.seed = seed_opt;
            return run_limitshape(job, la);
        }
        if (sub == leg) return run_legendre(job, lxi, llambda);
        if (sub == ron) return run_ronkin(job, ra);
        if (sub == burg) return run_burgers(job, step_config);
        if (sub == froz) return run_frozen(job, step_config);
    } catch (const PoleError& e) {
        write_diag(job, "pole", e.what(), {{"i", e.i()}, {"j", e.j()}});
        fmt::print(stderr, "{}\n", e.what());
        return kNumerical;
    } catch (const NotMaximal& e) {
        json roots = json::array();
        for (const auto& z : e.roots()) roots.push_back({z.real(), z.imag()});
        write_diag(job, "not_maximal", e.what(), {{"roots", roots}});
        fmt::print(stderr, "not maximal: {}\n", e.what());
        return kNumerical;
    } catch (const ConvergenceError& e) {
        write_diag(job, "convergence", e.what(), {{"residual", e.residual()}});
        fmt::print(stderr, "convergence: {}\n", e.what());
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "invalid argument: {}\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        write_diag(job, "numerical", e.what());
        fmt::print(stderr, "error: {}\n", e.what());
        return kNumerical;
    }
    return kUsage;
}
