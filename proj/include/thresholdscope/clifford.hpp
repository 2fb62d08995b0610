#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace ts {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

/// n+1 pairwise anticommuting Hermitian involutions of size N = 2^floor((n+1)/2).
/// alphas[0..n-1] are alpha_1..alpha_n, alphas[n] is beta.
struct CliffordRep {
    int n = 0;
    int N = 0;
    std::vector<CMat> alphas;

    const CMat& alpha(int j) const { return alphas.at(j); }
    const CMat& beta() const { return alphas.at(n); }
    CMat identity() const { return CMat::Identity(N, N); }
};

CliffordRep build_clifford(int n);

// alpha . p
CMat alpha_dot(const CliffordRep& rep, const Eigen::VectorXd& p);

// Sorted eigenvalues of alpha . p + m beta.
std::vector<double> symbol_spectrum(const CliffordRep& rep, const Eigen::VectorXd& p, double m);

// max_{j,k} |a_j a_k + a_k a_j - 2 delta_jk I| entrywise.
double anticommutator_residual(const CliffordRep& rep);
// max entrywise |a - a^*| over generators.
double hermiticity_residual(const CliffordRep& rep);

}  // namespace ts
