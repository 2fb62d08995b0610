#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ts {

// gamma(alpha, n) = pi^{n/2} 2^alpha Gamma(alpha/2) / Gamma((n - alpha)/2), 0 < alpha < n.
double riesz_gamma(double alpha, int n);

struct DimensionConstants {
    int n;
    double omega;  // area of S^{n-1}
    double gamma(double alpha) const { return riesz_gamma(alpha, n); }
};
DimensionConstants dimension_constants(int n);

/// Radially symmetric field on R^n sampled on composite Gauss-Legendre panels in |x|.
/// Beyond the last break the field follows the declared envelope f(r_max) (r_max / r)^decay.
struct ScalarField {
    int n = 3;
    int order = 0;
    std::vector<double> breaks;
    std::vector<double> r;        // sample radii
    std::vector<double> weights;  // n-dimensional cubature weights omega r^{n-1} dr
    std::vector<double> values;
    double decay = 0;

    double r_max() const { return breaks.back(); }
    double operator()(double t) const;  // interpolated value at |x| = t
};

struct FieldGrid {
    double r_max = 50.0;
    double h = 0.25;  // panel length near the origin
    int order = 10;
};

ScalarField make_radial_field(int n, const std::function<double(double)>& f, double decay, const FieldGrid& g = {});

// (-Delta)^{-alpha/2} f sampled at the same radii; requires f.decay > alpha.
ScalarField riesz_apply(const ScalarField& f, double alpha, int level = 3);

struct ClosedFormCheck {
    double quadrature;
    double closed_form;
    double rel_err() const;
};

// Int |e - y|^{alpha-n} |y|^{beta-n} dy against gamma(a) gamma(b) / gamma(a + b).
ClosedFormCheck beta_integral(double alpha, double beta, int n, int level = 3);
// Int |x - y|^{alpha-n} |y - w|^{beta-n} dy against the composition constant times |x - w|^{alpha+beta-n}.
ClosedFormCheck composition_check(double alpha, double beta, int n, const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                  int level = 3);

struct WeightedKernelResult {
    std::vector<double> integrals;
    std::vector<double> ratios;  // integral / envelope, per probe
    double sup_ratio = 0;
    double sup_ratio_refined = 0;  // same probes at level + 1
    double drift() const;
};

// Int |x1 - y|^{-k} <y>^{-beta-eps} |y - x2|^{-l} dy divided by the two-branch envelope in |x1 - x2|.
WeightedKernelResult weighted_kernel_bound(int n, double k, double l, double beta, double eps,
                                           const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& probes,
                                           int level = 3);
double weighted_kernel_envelope(int n, double k, double l, double beta, double dist);

enum class SteinWeissVariant { homogeneous, regularized };

struct SteinWeissGrid {
    double r_min = 1e-4;        // inner end of the geometric grid
    int panels_per_decade = 8;
    int order = 12;
};

struct SteinWeissResult {
    double norm;
    int iterations;
    int nodes;
};

// L^p operator norm of the kernel (1+|x|)^{-c}|x-y|^{c+d-n}(1+|y|)^{-d} (or its homogeneous form)
// restricted to radial functions on the ball of radius R.
SteinWeissResult stein_weiss_norm(int n, double c, double d, double p, SteinWeissVariant variant, double R,
                                  const SteinWeissGrid& g = {});

// Spherical mean kernel M(r, t) = Int_{S^{n-1}} |r e - t w|^s dw.
double spherical_mean_power(int n, double s, double r, double t);

}  // namespace ts
