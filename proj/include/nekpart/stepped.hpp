#pragma once

#include <array>
#include <utility>
#include <vector>

#include "nekpart/numerics.hpp"

namespace nekpart {

struct Monomial {
    int i = 0;
    int j = 0;
    double coeff = 0.0;
};

/// P(z, w) = sum c_ij z^i w^j with nonnegative exponents.
class PlaneCurve {
public:
    /// Merges repeated exponents and drops zero coefficients; throws unless two monomials remain.
    explicit PlaneCurve(std::vector<Monomial> monomials);

    /// z + w - 1.
    static PlaneCurve line();

    const std::vector<Monomial>& monomials() const noexcept { return monomials_; }
    /// Vertices of the Newton polygon, counter-clockwise.
    const std::vector<std::array<int, 2>>& newton_polygon() const noexcept { return hull_; }
    /// The Newton polygon is a segment.
    bool degenerate() const noexcept { return hull_.size() < 3; }
    int degree_z() const noexcept;
    int degree_w() const noexcept;

    cplx operator()(cplx z, cplx w) const;
    /// Coefficients of P(z, .) in w, lowest degree first.
    std::vector<cplx> w_coefficients(cplx z) const;
    PlaneCurve swapped() const;
    bool contains_slope(double s1, double s2, double tol = 1e-12) const;
    double coefficient(int i, int j) const;

private:
    std::vector<Monomial> monomials_;
    std::vector<std::array<int, 2>> hull_;
};

/// R(x, y) by Jensen's formula in w and adaptive quadrature in arg z.
double ronkin(const PlaneCurve& P, double x, double y, double tol = 1e-12);
/// Exact root counts for dR/dy; dR/dx from the swapped curve.
std::array<double, 2> ronkin_gradient(const PlaneCurve& P, double x, double y, double tol = 1e-12);

struct AmoebaTest {
    bool member = false;
    /// Torus passes within tol of the curve without a detected crossing.
    bool borderline = false;
    /// Smallest |ln|w_k| - y| over the scan.
    double margin = 0.0;
};

AmoebaTest amoeba_membership(const PlaneCurve& P, double x, double y, int samples = 2048, double tol = 1e-9);

/// sup over (x, y) of s.(x, y) - R(x, y); throws std::domain_error outside the Newton polygon.
double surface_tension_step(const PlaneCurve& P, double s1, double s2, double tol = 1e-10);

struct BurgersData {
    PlaneCurve P;
    PlaneCurve Q;
    double c = 0.0;
};

struct BurgersPoint {
    bool liquid = false;
    cplx z;
    cplx w;
    /// grad h = (arg w, -arg z) / pi on the liquid root.
    std::array<double, 2> grad{};
    /// All roots of the eliminated polynomial in z.
    std::vector<cplx> roots;
};

/// P must be of degree one in w; throws std::domain_error when the eliminated system has no roots.
BurgersPoint burgers_solve(const BurgersData& B, double x, double y);

/// Coefficients in z, lowest first, of Q(e^{-cx} z, e^{-cy} w(z)) with w(z) from P, denominators cleared.
std::vector<double> characteristic_polynomial(const BurgersData& B, double x, double y);

/// Discriminant of the characteristic polynomial, normalised to unit leading coefficient.
double characteristic_discriminant(const BurgersData& B, double x, double y);

struct Region {
    double x0 = 0.0;
    double x1 = 1.0;
    double y0 = 0.0;
    double y1 = 1.0;
};

struct BoundaryPoint {
    double x = 0.0;
    double y = 0.0;
    /// Real double root of the characteristic polynomial.
    double t = 0.0;
    /// Distance from the double root to the next root, relative to 1 + |t|; small near cusps.
    double triple_gap = 0.0;
};

/// Triple root of the characteristic polynomial on the boundary.
struct TriplePoint {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
    double discriminant = 0.0;
    double discriminant_gradient = 0.0;
    /// Nearby boundary points leave in one direction (cusp) rather than two (tangency).
    bool cusp = false;
};

struct FrozenBoundary {
    std::vector<BoundaryPoint> points;
    std::vector<TriplePoint> triple_points;
    /// Grid edges on which bisection failed.
    int failures = 0;
};

/// Discriminant sign changes on a resolution x resolution grid, refined by bisection along grid edges.
FrozenBoundary frozen_boundary(const BurgersData& B, const Region& region, int resolution);

/// Newton on G = G' = G'' = 0 from a boundary point.
TriplePoint refine_triple_point(const BurgersData& B, const BoundaryPoint& seed);

struct ExponentFit {
    double exponent = 0.0;
    std::vector<double> distances;
    std::vector<double> increments;
};

/// Log-log slope of |grad h(p + 2d n) - grad h(p + d n)| along the inward normal at a boundary point.
ExponentFit boundary_exponent(const BurgersData& B, const BoundaryPoint& p, double d_min = 1e-6, double d_max = 1e-3,
                              int samples = 12);

struct Cardioid {
    double X0 = 0.0;
    double Y0 = 0.0;
    double rho = 1.0;
    double angle = 0.0;

    /// Cusp at t = 0.
    std::array<double, 2> at(double t) const;
    /// Distance from a point to the curve.
    double distance(double X, double Y) const;
};

struct CardioidFit {
    Cardioid shape;
    double max_residual = 0.0;
    /// Bounding-box diagonal of the data.
    double scale = 1.0;
};

/// Gauss-Newton orthogonal-distance fit.
CardioidFit fit_cardioid(const std::vector<std::array<double, 2>>& points);

/// Cubic Q whose dual under X Z + Y W = 1 is the given cardioid, for the line P and multiplier c.
BurgersData cardioid_configuration(const Cardioid& shape, double c);

struct HeightField {
    Region region;
    int nx = 0;
    int ny = 0;
    /// Row-major, index iy * nx + ix.
    std::vector<double> h;
    std::vector<std::array<double, 2>> grad;
    std::vector<bool> liquid;
    double curl_residual = 0.0;
};

/// Trapezoid path integration from the lower-left node; frozen nodes take the triangle vertex nearest
/// the gradient of the closest liquid node. Throws ConvergenceError above curl_tol.
HeightField height_reconstruct(const Region& region, int nx, int ny, std::vector<std::array<double, 2>> grad,
                               std::vector<bool> liquid, double curl_tol = 1e-4);

/// Evaluates burgers_solve on the grid and reconstructs h.
HeightField burgers_height(const BurgersData& B, const Region& region, int nx, int ny, double curl_tol = 1e-4,
                           int threads = 1);

}  // namespace nekpart
