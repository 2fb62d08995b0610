#pragma once

#include <complex>

#include <Eigen/Dense>

#include "thresholdscope/clifford.hpp"

namespace ts {

enum class Family { schrodinger, dirac_massless, dirac_massive };

const char* family_name(Family f);
Family parse_family(const std::string& s);

struct SpinorKernelValue {
    CMat value;
    double opnorm = 0;  // spectral norm of value
};

SpinorKernelValue make_kernel_value(CMat value);

// omega_{n-1} = 2 pi^{n/2} / Gamma(n/2), area of the unit sphere in R^n.
double sphere_area(int n);

// Root w of w^2 = z with Im w >= 0; real boundary values are upper-half-plane limits.
cplx upper_root(cplx z);

// Free Schrodinger resolvent kernel (h0 - z)^{-1}(x, y) for |x - y| = r.
cplx schrodinger_green(int n, cplx z, double r);
// Same kernel parameterized by its root w (Im w >= 0, w != 0).
cplx schrodinger_green_root(int n, cplx w, double r);

// Zero-energy kernel [(n - 2) omega_{n-1}]^{-1} r^{2-n}, n >= 3.
double schrodinger_green_threshold(int n, double r);
// The equivalent Gamma-function form 4^{-1} pi^{-n/2} Gamma((n-2)/2) r^{2-n}.
double schrodinger_green_threshold_gamma_form(int n, double r);

struct ThresholdExpansion {
    cplx singular;
    cplx constant;
};

// Leading behaviour of the n = 1, 2 kernels for 0 < |z| < 1e-2.
ThresholdExpansion schrodinger_threshold_expansion(int n, cplx z, double r);

// Massless Dirac resolvent kernel (H0 - z)^{-1}(x, y), z in the closed upper half-plane minus 0.
SpinorKernelValue massless_dirac_green(const CliffordRep& rep, cplx z, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y);
// R_{0,0}(d) = i Gamma(n/2) / (2 pi^{n/2}) alpha . d / |d|^n.
SpinorKernelValue massless_threshold_kernel(const CliffordRep& rep, const Eigen::VectorXd& d);
// Gamma(n/2) / (2 pi^{n/2}), the coefficient of the threshold kernel.
double massless_threshold_coefficient(int n);

// Massive Dirac resolvent kernel with k = (z^2 - m^2)^{1/2}, Im k > 0.
SpinorKernelValue massive_dirac_green(const CliffordRep& rep, double m, cplx z, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y);
// r00(d) m (beta + sign I) + R00(d), n >= 3, sign = +1 or -1.
SpinorKernelValue massive_threshold_kernel(const CliffordRep& rep, double m, int sign, const Eigen::VectorXd& d);

struct BlowupExpansion {
    CMat log_coefficient;  // -(4 pi)^{-1} (m beta +- m I)
    cplx log_value;        // 2 ln k, the continuous branch of ln(z^2 - m^2)
    CMat finite_part;
    CMat expansion() const { return log_coefficient * log_value + finite_part; }
};

// n = 2 massive kernel near z = +-m (sign taken from Re z), 0 < |z^2 - m^2| < 1e-2.
BlowupExpansion massive_blowup_n2(const CliffordRep& rep, double m, cplx z, const Eigen::VectorXd& d);

}  // namespace ts
