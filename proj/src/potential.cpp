#include "thresholdscope/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thresholdscope/errors.hpp"

namespace ts {

namespace {

// |v| < 1e-14 |v(0)| beyond this many widths.
const double kGaussianCut = std::sqrt(14.0 * std::log(10.0));

void check_table(const RadialTable& t, const char* what) {
    if (t.r.empty() || t.r.size() != t.v.size())
        throw ValidationError(std::string(what) + ": r and v must be nonempty and of equal length");
    if (t.r.front() < 0.0) throw ValidationError(std::string(what) + ": radii must be nonnegative");
    for (std::size_t i = 1; i < t.r.size(); ++i)
        if (!(t.r[i] > t.r[i - 1])) throw ValidationError(std::string(what) + ": radii must increase strictly");
    for (double x : t.v)
        if (!std::isfinite(x)) throw ValidationError(std::string(what) + ": non-finite value");
}

double table_value(const RadialTable& t, double r) {
    if (r <= t.r.front()) return t.v.front();
    if (r > t.r.back()) return 0.0;
    const auto it = std::upper_bound(t.r.begin(), t.r.end(), r);
    const std::size_t j = std::min<std::size_t>(it - t.r.begin(), t.r.size() - 1);
    const double s = (r - t.r[j - 1]) / (t.r[j] - t.r[j - 1]);
    return (1 - s) * t.v[j - 1] + s * t.v[j];
}

double table_support(const RadialTable& t) {
    for (std::size_t i = t.r.size(); i-- > 0;)
        if (t.v[i] != 0.0) return i + 1 < t.r.size() ? t.r[i + 1] : t.r[i];
    return 0.0;
}

}  // namespace

const char* threshold_name(Threshold t) {
    switch (t) {
        case Threshold::zero: return "0";
        case Threshold::plus_m: return "+m";
        case Threshold::minus_m: return "-m";
    }
    return "?";
}

const char* shape_name(const Shape& s) {
    static const char* names[] = {"square_well", "gaussian", "radial_table", "em_coupling"};
    return names[s.index()];
}

std::vector<std::string> validate(const PotentialSpec& spec) {
    std::vector<std::string> warnings;
    const bool dirac = spec.family != Family::schrodinger;
    if (spec.family == Family::schrodinger && spec.n < 3)
        throw ValidationError("schrodinger threshold analysis needs n >= 3");
    if (dirac && (spec.n < 2 || spec.n > 12)) throw ValidationError("dirac families need 2 <= n <= 12");
    if (spec.family == Family::dirac_massive) {
        if (!(spec.m > 0)) throw ValidationError("massive family requires a mass m > 0");
        if (spec.threshold == Threshold::zero) throw ValidationError("massive family analyzes threshold +m or -m");
    } else {
        if (spec.m != 0.0) throw ValidationError("mass given for a massless family");
        if (spec.threshold != Threshold::zero) throw ValidationError("massless families have threshold 0");
    }
    if (!(spec.coupling >= 0) || !std::isfinite(spec.coupling)) throw ValidationError("coupling must be >= 0");
    if (!(spec.rho > 1)) throw ValidationError("decay exponent rho must exceed 1");
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, SquareWell>) {
                if (!(s.radius > 0) || !std::isfinite(s.depth)) throw ValidationError("square_well: radius > 0, finite depth");
            } else if constexpr (std::is_same_v<S, GaussianWell>) {
                if (!(s.width > 0) || !std::isfinite(s.amplitude)) throw ValidationError("gaussian: width > 0, finite amplitude");
            } else if constexpr (std::is_same_v<S, RadialTable>) {
                check_table(s, "radial_table");
            } else {
                if (!dirac) throw ValidationError("em_coupling requires a dirac family");
                check_table(s.v, "em_coupling.v");
                check_table(s.a, "em_coupling.a");
            }
        },
        spec.shape);
    if (spec.family == Family::dirac_massless && spec.rho < 2) {
        std::ostringstream os;
        os << "rho = " << spec.rho << " is below the <x>^{-2} decay assumed for massless Dirac threshold analysis";
        warnings.push_back(os.str());
    }
    if (spec.family != Family::dirac_massless && spec.rho < 4) {
        std::ostringstream os;
        os << "rho = " << spec.rho << " is below the <x>^{-4} decay assumed for " << family_name(spec.family)
           << " threshold analysis";
        warnings.push_back(os.str());
    }
    return warnings;
}

bool is_radial_scalar(const PotentialSpec& spec) { return !std::holds_alternative<EmCoupling>(spec.shape); }

double scalar_profile(const PotentialSpec& spec, double r) {
    const double v = std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, SquareWell>) return r < s.radius ? -s.depth : 0.0;
            else if constexpr (std::is_same_v<S, GaussianWell>) {
                const double u = r / s.width;
                return u < kGaussianCut ? -s.amplitude * std::exp(-u * u) : 0.0;
            } else if constexpr (std::is_same_v<S, RadialTable>) return table_value(s, r);
            else return table_value(s.v, r);
        },
        spec.shape);
    return spec.coupling * v;
}

double vector_profile(const PotentialSpec& spec, double r) {
    if (const auto* e = std::get_if<EmCoupling>(&spec.shape)) return spec.coupling * table_value(e->a, r);
    return 0.0;
}

double support_radius(const PotentialSpec& spec) {
    return std::visit(
        [](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, SquareWell>) return s.depth != 0.0 ? s.radius : 0.0;
            else if constexpr (std::is_same_v<S, GaussianWell>) return s.amplitude != 0.0 ? kGaussianCut * s.width : 0.0;
            else if constexpr (std::is_same_v<S, RadialTable>) return table_support(s);
            else return std::max(table_support(s.v), table_support(s.a));
        },
        spec.shape);
}

std::vector<double> profile_breaks(const PotentialSpec& spec) {
    std::vector<double> b;
    std::visit(
        [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, RadialTable>) b = s.r;
            else if constexpr (std::is_same_v<S, EmCoupling>) {
                b = s.v.r;
                b.insert(b.end(), s.a.r.begin(), s.a.r.end());
            }
        },
        spec.shape);
    const double a = support_radius(spec);
    b.push_back(a);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    b.erase(std::remove_if(b.begin(), b.end(), [&](double x) { return x <= 0.0 || x > a; }), b.end());
    return b;
}

CMat potential_matrix(const PotentialSpec& spec, const CliffordRep* rep, const Eigen::VectorXd& x) {
    const double r = x.norm();
    const double v = scalar_profile(spec, r);
    if (spec.family == Family::schrodinger) return CMat::Constant(1, 1, v);
    if (!rep) throw ValidationError("dirac potential needs a Clifford representation");
    CMat V = v * rep->identity();
    const double a = vector_profile(spec, r);
    if (a != 0.0 && r > 0.0) V -= (a / r) * alpha_dot(*rep, x);
    return V;
}

PointFactor factorize_scalar(double v) {
    const double s = std::sqrt(std::abs(v));
    const double u = v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
    return {CMat::Constant(1, 1, s), CMat::Constant(1, 1, u * s), CMat::Constant(1, 1, u)};
}

PointFactor factorize_matrix(const CMat& V) {
    if (V.rows() != V.cols()) throw ValidationError("potential matrix must be square");
    const double scale = std::max(1.0, V.cwiseAbs().maxCoeff());
    if ((V - V.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ValidationError("potential matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMat> es(V);
    const Eigen::VectorXd e = es.eigenvalues();
    const double emax = e.cwiseAbs().maxCoeff();
    Eigen::VectorXd root(e.size()), sgn(e.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        const bool null = std::abs(e[i]) <= 1e-14 * emax;
        root[i] = null ? 0.0 : std::sqrt(std::abs(e[i]));
        sgn[i] = null ? 0.0 : (e[i] > 0 ? 1.0 : -1.0);
    }
    const CMat& Q = es.eigenvectors();
    PointFactor f;
    f.V1 = Q * root.asDiagonal() * Q.adjoint();
    f.U = Q * sgn.asDiagonal() * Q.adjoint();
    f.V2 = f.U * f.V1;
    return f;
}

Factorization factorize(const PotentialSpec& spec, const CliffordRep* rep, const Eigen::MatrixXd& points) {
    Factorization out;
    out.factors.reserve(points.cols());
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
        const CMat V = potential_matrix(spec, rep, points.col(j));
        PointFactor f = V.rows() == 1 ? factorize_scalar(V(0, 0).real()) : factorize_matrix(V);
        out.max_residual = std::max(out.max_residual, (f.V1.adjoint() * f.V2 - V).cwiseAbs().maxCoeff());
        out.factors.push_back(std::move(f));
    }
    return out;
}

}  // namespace ts
