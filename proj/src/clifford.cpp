#include "thresholdscope/clifford.hpp"

#include <algorithm>
#include <string>

#include "thresholdscope/errors.hpp"

namespace ts {

namespace {

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMat pauli(char c) {
    CMat s(2, 2);
    const cplx I(0, 1);
    switch (c) {
        case 'x': s << 0, 1, 1, 0; break;
        case 'y': s << 0, -I, I, 0; break;
        case 'z': s << 1, 0, 0, -1; break;
        default: s.setIdentity();
    }
    return s;
}

void check_dim(const CliffordRep& rep, const Eigen::VectorXd& p) {
    if (p.size() != rep.n)
        throw ValidationError("dimension mismatch: vector of length " + std::to_string(p.size()) +
                              " for n = " + std::to_string(rep.n));
}

}  // namespace

CliffordRep build_clifford(int n) {
    if (n < 2 || n > 12)
        throw ValidationError("dimension out of range: n = " + std::to_string(n) + " (need 2 <= n <= 12)");
    const int k = (n + 1) / 2;
    CliffordRep rep;
    rep.n = n;
    rep.N = 1 << k;

    // Jordan-Wigner ladder on k qubits: Z..Z X I..I, Z..Z Y I..I, and finally Z..Z.
    auto word = [&](int pos, char c) {
        CMat m = CMat::Identity(1, 1);
        for (int q = 0; q < k; ++q) m = kron(m, q < pos ? pauli('z') : (q == pos ? pauli(c) : pauli('i')));
        return m;
    };
    for (int j = 0; j < k && static_cast<int>(rep.alphas.size()) < n + 1; ++j) {
        rep.alphas.push_back(word(j, 'x'));
        if (static_cast<int>(rep.alphas.size()) < n + 1) rep.alphas.push_back(word(j, 'y'));
    }
    if (static_cast<int>(rep.alphas.size()) < n + 1) rep.alphas.push_back(word(k, 'i'));
    return rep;
}

CMat alpha_dot(const CliffordRep& rep, const Eigen::VectorXd& p) {
    check_dim(rep, p);
    CMat out = CMat::Zero(rep.N, rep.N);
    for (int j = 0; j < rep.n; ++j) out += p[j] * rep.alphas[j];
    return out;
}

std::vector<double> symbol_spectrum(const CliffordRep& rep, const Eigen::VectorXd& p, double m) {
    if (m < 0) throw ValidationError("mass must be nonnegative");
    CMat h = alpha_dot(rep, p) + m * rep.beta();
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + rep.N);
    std::sort(ev.begin(), ev.end());
    return ev;
}

double anticommutator_residual(const CliffordRep& rep) {
    double worst = 0;
    const CMat id = rep.identity();
    for (int j = 0; j <= rep.n; ++j)
        for (int k = j; k <= rep.n; ++k) {
            CMat ac = rep.alphas[j] * rep.alphas[k] + rep.alphas[k] * rep.alphas[j];
            if (j == k) ac -= 2.0 * id;
            worst = std::max(worst, ac.cwiseAbs().maxCoeff());
        }
    return worst;
}

double hermiticity_residual(const CliffordRep& rep) {
    double worst = 0;
    for (const auto& a : rep.alphas) worst = std::max(worst, (a - a.adjoint()).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace ts
