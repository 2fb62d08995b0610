#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "thresholdscope/clifford.hpp"
#include "thresholdscope/greens.hpp"

namespace ts {

// Base profiles v(r); the potential is coupling * v. Positive depth/amplitude means attractive.
struct SquareWell {
    double depth = 1.0;  // v = -depth on r < radius
    double radius = 1.0;
};

struct GaussianWell {
    double amplitude = 1.0;  // v = -amplitude exp(-(r / width)^2)
    double width = 1.0;
};

// Piecewise linear in r between nodes, v(r_0) for r < r_0, zero beyond the last node.
struct RadialTable {
    std::vector<double> r;
    std::vector<double> v;
};

// Matrix potential v(r) I_N - a(r) alpha . x / |x| (Dirac families only).
struct EmCoupling {
    RadialTable v;
    RadialTable a;
};

using Shape = std::variant<SquareWell, GaussianWell, RadialTable, EmCoupling>;

enum class Threshold { zero, plus_m, minus_m };

const char* threshold_name(Threshold t);

struct PotentialSpec {
    Family family = Family::schrodinger;
    int n = 3;
    double m = 0.0;
    Threshold threshold = Threshold::zero;  // plus_m or minus_m for the massive family
    Shape shape = SquareWell{};
    double coupling = 1.0;
    double rho = 10.0;  // declared decay exponent, |V(x)| <= C <x>^{-rho}
};

const char* shape_name(const Shape& s);

// Throws ValidationError on inconsistent input; returns non-fatal decay-hypothesis warnings.
std::vector<std::string> validate(const PotentialSpec& spec);

bool is_radial_scalar(const PotentialSpec& spec);

// Scalar profile: coupling * v(r). For em_coupling this is the v part.
double scalar_profile(const PotentialSpec& spec, double r);
// coupling * a(r) for em_coupling, 0 otherwise.
double vector_profile(const PotentialSpec& spec, double r);

// Radius beyond which the potential vanishes (below 1e-14 of its peak for the Gaussian).
double support_radius(const PotentialSpec& spec);
// Radii where the profile is not smooth; grids place cell boundaries there.
std::vector<double> profile_breaks(const PotentialSpec& spec);

// Pointwise potential matrix at x: 1x1 for Schrodinger, N x N for Dirac.
CMat potential_matrix(const PotentialSpec& spec, const CliffordRep* rep, const Eigen::VectorXd& x);

/// Pointwise factors V = V1^* V2, V1 = |V|^{1/2}, V2 = U |V|^{1/2}.
struct PointFactor {
    CMat V1;
    CMat V2;
    CMat U;
};

// Eigendecomposition of a Hermitian matrix, eigenvalues below 1e-14 of the largest clipped to 0.
PointFactor factorize_matrix(const CMat& V);
PointFactor factorize_scalar(double v);

struct Factorization {
    std::vector<PointFactor> factors;
    double max_residual = 0.0;  // max_x |V1^* V2 - V| entrywise
};

Factorization factorize(const PotentialSpec& spec, const CliffordRep* rep, const Eigen::MatrixXd& points);

}  // namespace ts
