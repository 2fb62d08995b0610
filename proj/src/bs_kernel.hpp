#pragma once

#include <vector>

#include <Eigen/Dense>

#include "thresholdscope/bs.hpp"

namespace ts::detail {

using Small = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;

/// Threshold Green's kernel of a radial channel. Schrodinger s-wave acts on L2(omega r^{n-1} dr);
/// Dirac channels act on (G, F) in L2(dr)^2 with Psi = r^{-(n-1)/2} (G Omega_kappa, i F Omega_{-kappa}).
struct RadialKernel {
    Family family;
    int n;
    double m;
    Threshold threshold;
    double kappa;
    double omega;

    int block() const { return family == Family::schrodinger ? 1 : 2; }
    // g receives block() x block() entries, row-major. same: r and t are one node (jump terms halved).
    void eval(double r, double t, bool same, double* g) const;
    // d/dr of the Schrodinger kernel.
    double radial_derivative(double r, double t, bool same) const;
};

RadialKernel radial_kernel(const BSOperator& op);

/// Threshold kernel on the full grid: even scalar part g(|d|) E plus odd part i c alpha . d / |d|^n.
struct FullKernel {
    int n = 3;
    int N = 1;
    bool has_even = false;
    bool has_odd = false;
    Small even;               // 1 (Schrodinger) or m (beta +- I)
    std::vector<Small> alpha;
    double coef = 0.0;

    void eval(const double* d, Small& out) const;
    // Integral of g(|x - y|) over the ball |y| < R at |x| = r <= R.
    double ball_integral(double r, double R) const;
};

FullKernel full_kernel(const BSOperator& op);

}  // namespace ts::detail
