#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "thresholdscope/bs.hpp"
#include "thresholdscope/errors.hpp"

namespace ts {

namespace {

constexpr Eigen::Index kDenseHermitian = 1500;
constexpr Eigen::Index kDenseGeneral = 3000;

struct RawEigs {
    std::vector<cplx> values;
    std::vector<CVec> vectors;
    bool complete = false;  // every eigenvalue computed
    double floor = 0.0;     // uncomputed eigenvalues satisfy |mu| <= floor
    int iterations = 0;
    std::string solver;
};

template <class Dense>
Dense orthonormalize(const Dense& Z) {
    Dense Q = Dense::Identity(Z.rows(), Z.cols());
    Eigen::HouseholderQR<Dense> qr(Z);
    Q.applyOnTheLeft(qr.householderQ());
    return Q;
}

// Subspace iteration with Rayleigh-Ritz for the Hermitian eigenpairs with |mu| >= min_abs. The block
// grows until at least a quarter of its Ritz values fall below min_abs.
template <class Mat>
RawEigs hermitian_top(const Mat& K, double min_abs, int want) {
    using Scalar = typename Mat::Scalar;
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index dim = K.rows();
    const double scale = std::max(K.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    RawEigs out;
    out.solver = "subspace";
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> gauss;
    Eigen::Index p = std::min<Eigen::Index>(dim, 2 * want);
    Dense Q(dim, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) Q(i, j) = Scalar(gauss(rng));
    Q = orthonormalize(Q);
    Eigen::VectorXd theta;
    Dense X, KX;
    for (int it = 0; it < 2000; ++it) {
        const Dense Y = K * Q;
        Dense H = Q.adjoint() * Y;
        H = 0.5 * (H + Dense(H.adjoint()));
        Eigen::SelfAdjointEigenSolver<Dense> es(H);
        std::vector<Eigen::Index> order(p);
        for (Eigen::Index i = 0; i < p; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](auto a, auto b) { return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]); });
        Dense U(p, p);
        theta.resize(p);
        for (Eigen::Index i = 0; i < p; ++i) {
            U.col(i) = es.eigenvectors().col(order[i]);
            theta[i] = es.eigenvalues()[order[i]];
        }
        X = Q * U;
        KX = Y * U;
        ++out.iterations;
        Eigen::Index needed = 0;
        while (needed < p && std::abs(theta[needed]) >= min_abs) ++needed;
        needed = std::max<Eigen::Index>(needed, std::min<Eigen::Index>(want, p));
        if (p < dim && needed > p - std::max<Eigen::Index>(4, p / 4)) {
            // Enlarge the block, keeping the current Ritz vectors.
            const Eigen::Index q = std::min<Eigen::Index>(dim, 2 * p);
            Dense Z(dim, q);
            Z.leftCols(p) = KX;
            for (Eigen::Index j = p; j < q; ++j)
                for (Eigen::Index i = 0; i < dim; ++i) Z(i, j) = Scalar(gauss(rng));
            p = q;
            Q = orthonormalize(Z);
            continue;
        }
        bool converged = true;
        for (Eigen::Index i = 0; i < needed && converged; ++i)
            converged = (KX.col(i) - theta[i] * X.col(i)).norm() <= 1e-10 * scale;
        if (converged) {
            for (Eigen::Index i = 0; i < needed; ++i) {
                out.values.push_back(theta[i]);
                out.vectors.push_back(X.col(i).template cast<cplx>());
            }
            out.complete = needed == dim;
            out.floor = needed < p ? std::abs(theta[needed]) : 0.0;
            return out;
        }
        Q = orthonormalize(KX);
    }
    throw SolverError("bs_spectrum", "subspace iteration did not converge");
}

template <class Mat>
RawEigs hermitian_dense(const Mat& K) {
    Eigen::SelfAdjointEigenSolver<Mat> es(K);
    if (es.info() != Eigen::Success) throw SolverError("bs_spectrum", "symmetric eigensolver failed");
    RawEigs out;
    out.solver = "dense-hermitian";
    out.complete = true;
    for (Eigen::Index i = 0; i < K.rows(); ++i) {
        out.values.push_back(es.eigenvalues()[i]);
        out.vectors.push_back(es.eigenvectors().col(i).template cast<cplx>());
    }
    return out;
}

RawEigs general_dense(const BSOperator& op) {
    if (op.size() > kDenseGeneral) {
        std::ostringstream os;
        os << "general eigensolver limited to dimension " << kDenseGeneral << ", got " << op.size();
        throw ValidationError(os.str());
    }
    RawEigs out;
    out.solver = "dense-general";
    out.complete = true;
    if (op.is_real) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(op.real_matrix);
        if (es.info() != Eigen::Success) throw SolverError("bs_spectrum", "general eigensolver failed");
        for (Eigen::Index i = 0; i < op.size(); ++i) {
            out.values.push_back(es.eigenvalues()[i]);
            out.vectors.push_back(es.eigenvectors().col(i).normalized());
        }
    } else {
        Eigen::ComplexEigenSolver<CMat> es(op.complex_matrix);
        if (es.info() != Eigen::Success) throw SolverError("bs_spectrum", "general eigensolver failed");
        for (Eigen::Index i = 0; i < op.size(); ++i) {
            out.values.push_back(es.eigenvalues()[i]);
            out.vectors.push_back(es.eigenvectors().col(i).normalized());
        }
    }
    return out;
}

RawEigs eigs(const BSOperator& op, double min_abs, int want) {
    if (!op.hermitian) return general_dense(op);
    if (op.size() <= kDenseHermitian)
        return op.is_real ? hermitian_dense(op.real_matrix) : hermitian_dense(op.complex_matrix);
    return op.is_real ? hermitian_top(op.real_matrix, min_abs, want) : hermitian_top(op.complex_matrix, min_abs, want);
}

double smallest_singular_value_shifted(const BSOperator& op) {
    const CMat A = CMat::Identity(op.size(), op.size()) + op.matrix();
    Eigen::BDCSVD<CMat> svd(A);
    return svd.singularValues().minCoeff();
}

bool zero_operator(const BSOperator& op) {
    return op.is_real ? op.real_matrix.isZero(0.0) : op.complex_matrix.isZero(0.0);
}

}  // namespace

Spectrum bs_spectrum(const BSOperator& op, int count) {
    if (count < 1) throw ValidationError("count must be positive");
    Spectrum s;
    s.hermitian = op.hermitian;
    if (zero_operator(op)) {
        s.solver = "zero";
        s.sigma_min = 1.0;
        return s;
    }
    const RawEigs raw = eigs(op, 0.5, std::max(count, 8));
    s.solver = raw.solver;
    s.iterations = raw.iterations;
    for (std::size_t i = 0; i < raw.values.size(); ++i) {
        EigenPair p{raw.values[i], raw.vectors[i], 0.0};
        p.residual = (op.apply(p.vec) - p.mu * p.vec).norm();
        s.pairs.push_back(std::move(p));
    }
    std::sort(s.pairs.begin(), s.pairs.end(),
              [](const EigenPair& a, const EigenPair& b) { return std::abs(a.mu + 1.0) < std::abs(b.mu + 1.0); });
    if (op.hermitian) {
        s.sigma_min = raw.complete ? 1e300 : 1.0 - raw.floor;
        for (const auto& p : s.pairs) s.sigma_min = std::min(s.sigma_min, std::abs(p.mu + 1.0));
    } else {
        s.sigma_min = smallest_singular_value_shifted(op);
    }
    if (int(s.pairs.size()) > count) s.pairs.resize(count);
    return s;
}

std::vector<CriticalCoupling> critical_coupling(const PotentialSpec& spec, const GridSpec& grid, double lambda_min,
                                                double lambda_max, double tolerance) {
    if (!(lambda_min >= 0) || !(lambda_max > lambda_min) || !std::isfinite(lambda_max))
        throw ValidationError("coupling range must satisfy 0 <= lambda_min < lambda_max < inf");
    PotentialSpec unit = spec;
    unit.coupling = 1.0;
    std::vector<double> channels = grid.kind == GridKind::full ? std::vector<double>{0.0} : lowest_channels(spec);
    std::vector<CriticalCoupling> out;
    for (double kappa : channels) {
        const BSOperator op = assemble(unit, grid, kappa);
        if (zero_operator(op)) continue;
        const RawEigs raw = eigs(op, 1.0 / lambda_max, 8);
        for (const cplx mu : raw.values) {
            if (!(mu.real() < 0) || std::abs(mu.imag()) > tolerance * std::abs(mu)) continue;
            const double lc = -1.0 / mu.real();
            if (lc >= lambda_min && lc <= lambda_max) out.push_back({lc, op.channel, op.kappa});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
    return out;
}

}  // namespace ts
