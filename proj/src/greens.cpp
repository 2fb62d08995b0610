#include "thresholdscope/greens.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "thresholdscope/errors.hpp"
#include "thresholdscope/special.hpp"

namespace ts {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

double norm2(const CMat& a) {
    Eigen::JacobiSVD<CMat> svd(a);
    return svd.singularValues()(0);
}

Eigen::VectorXd displacement(const CliffordRep& rep, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != rep.n || y.size() != rep.n) throw ValidationError("point dimension does not match n");
    Eigen::VectorXd d = x - y;
    if (d.norm() == 0.0) throw ValidationError("coincident points x = y");
    return d;
}

// (i/4)(2pi)^{-nu} r^{2-n} (wr)^nu H_nu(wr) and -(1/4)(2pi)^{-nu} r^{1-n} (wr)^{n/2} H_{n/2}(wr):
// the scalar kernel and the coefficient of alpha . d/|d| in -i alpha . grad of it.
void dirac_parts(int n, cplx w, double r, cplx& scalar, cplx& vector) {
    const HankelOrder nu = HankelOrder::from_twice(n - 2);
    const HankelOrder nu1 = HankelOrder::from_twice(n);
    const double v = 0.5 * (n - 2);
    const cplx wr = w * r;
    const double pre = std::pow(2.0 * pi, -v);
    scalar = 0.25 * I * pre * std::pow(r, 2.0 - n) * std::pow(wr, v) * hankel1(nu, wr);
    vector = -0.25 * pre * std::pow(r, 1.0 - n) * std::pow(wr, v + 1.0) * hankel1(nu1, wr);
}

}  // namespace

const char* family_name(Family f) {
    switch (f) {
        case Family::schrodinger: return "schrodinger";
        case Family::dirac_massless: return "dirac_massless";
        case Family::dirac_massive: return "dirac_massive";
    }
    return "?";
}

Family parse_family(const std::string& s) {
    if (s == "schrodinger") return Family::schrodinger;
    if (s == "dirac_massless") return Family::dirac_massless;
    if (s == "dirac_massive") return Family::dirac_massive;
    throw ValidationError("unknown family '" + s + "'");
}

SpinorKernelValue make_kernel_value(CMat value) {
    SpinorKernelValue out;
    out.opnorm = norm2(value);
    out.value = std::move(value);
    return out;
}

double sphere_area(int n) { return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n); }

cplx upper_root(cplx z) {
    cplx w = std::sqrt(cplx(z.real(), z.imag() == 0.0 ? 0.0 : z.imag()));
    if (w.imag() < 0.0) w = -w;
    return w;
}

cplx schrodinger_green_root(int n, cplx w, double r) {
    if (n < 1) throw ValidationError("dimension must be >= 1");
    if (w == cplx(0.0, 0.0)) throw ValidationError("z = 0: use the threshold kernel");
    if (!(w.imag() >= 0.0)) throw ValidationError("invalid branch: Im z^{1/2} < 0");
    if (n == 1) {
        if (r < 0) throw ValidationError("negative distance");
        return 0.5 * I / w * std::exp(I * w * r);
    }
    if (!(r > 0)) throw ValidationError("coincident points x = y");
    const double v = 0.5 * (n - 2);
    return 0.25 * I * std::pow(w / (2.0 * pi * r), v) * hankel1(HankelOrder::from_twice(n - 2), w * r);
}

cplx schrodinger_green(int n, cplx z, double r) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ValidationError("invalid branch: non-finite z");
    if (z == cplx(0.0, 0.0)) throw ValidationError("z = 0: use the threshold kernel");
    return schrodinger_green_root(n, upper_root(z), r);
}

double schrodinger_green_threshold(int n, double r) {
    if (n < 3) throw ValidationError("zero-energy Schrodinger kernel requires n >= 3");
    if (!(r > 0)) throw ValidationError("coincident points x = y");
    return std::pow(r, 2.0 - n) / ((n - 2) * sphere_area(n));
}

double schrodinger_green_threshold_gamma_form(int n, double r) {
    if (n < 3) throw ValidationError("zero-energy Schrodinger kernel requires n >= 3");
    return 0.25 * std::pow(pi, -0.5 * n) * std::tgamma(0.5 * (n - 2)) * std::pow(r, 2.0 - n);
}

ThresholdExpansion schrodinger_threshold_expansion(int n, cplx z, double r) {
    const double az = std::abs(z);
    if (!(az > 0.0 && az < 1e-2)) throw ValidationError("threshold expansion needs 0 < |z| < 1e-2");
    const cplx w = upper_root(z);
    if (n == 1) return {0.5 * I / w, -0.5 * r};
    if (n == 2) {
        if (!(r > 0)) throw ValidationError("coincident points x = y");
        return {-std::log(0.5 * w * r) / (2.0 * pi), digamma(1.0) / (2.0 * pi) + 0.25 * I};
    }
    throw ValidationError("threshold expansion is defined for n = 1, 2");
}

double massless_threshold_coefficient(int n) { return std::tgamma(0.5 * n) / (2.0 * std::pow(pi, 0.5 * n)); }

SpinorKernelValue massless_threshold_kernel(const CliffordRep& rep, const Eigen::VectorXd& d) {
    if (d.size() != rep.n) throw ValidationError("displacement dimension does not match n");
    const double r = d.norm();
    if (r == 0.0) throw ValidationError("zero displacement");
    SpinorKernelValue out;
    out.value = (I * massless_threshold_coefficient(rep.n) * std::pow(r, -rep.n)) * alpha_dot(rep, d);
    // (alpha . u)^2 = I for a unit vector u, so the norm is the scalar coefficient.
    out.opnorm = massless_threshold_coefficient(rep.n) * std::pow(r, 1.0 - rep.n);
    return out;
}

SpinorKernelValue massless_dirac_green(const CliffordRep& rep, cplx z, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y) {
    if (z == cplx(0.0, 0.0)) throw ValidationError("z = 0: use the threshold kernel");
    if (z.imag() < 0.0) throw ValidationError("z in the open lower half-plane");
    const Eigen::VectorXd d = displacement(rep, x, y);
    const double r = d.norm();
    cplx s, v;
    dirac_parts(rep.n, cplx(z.real(), z.imag() == 0.0 ? 0.0 : z.imag()), r, s, v);
    return make_kernel_value(z * s * rep.identity() + (v / r) * alpha_dot(rep, d));
}

SpinorKernelValue massive_dirac_green(const CliffordRep& rep, double m, cplx z, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y) {
    if (!(m > 0)) throw ValidationError("massive kernel requires m > 0");
    if (z.imag() == 0.0 && std::abs(z.real()) > m)
        throw ValidationError("z on the cut R \\ [-m, m] without a limiting direction");
    const cplx k2 = z * z - m * m;
    if (k2 == cplx(0.0, 0.0)) throw ValidationError("z = +-m: use the threshold kernel");
    const cplx k = upper_root(k2);
    if (!(k.imag() > 0.0)) throw ValidationError("invalid branch: Im (z^2 - m^2)^{1/2} <= 0");
    const Eigen::VectorXd d = displacement(rep, x, y);
    const double r = d.norm();
    cplx s, v;
    dirac_parts(rep.n, k, r, s, v);
    return make_kernel_value(s * (m * rep.beta() + z * rep.identity()) + (v / r) * alpha_dot(rep, d));
}

SpinorKernelValue massive_threshold_kernel(const CliffordRep& rep, double m, int sign, const Eigen::VectorXd& d) {
    if (rep.n == 2) throw ValidationError("n = 2 massive kernel diverges at +-m: use massive_blowup_n2");
    if (!(m > 0)) throw ValidationError("massive kernel requires m > 0");
    if (sign != 1 && sign != -1) throw ValidationError("threshold sign must be +1 or -1");
    const auto r00 = massless_threshold_kernel(rep, d);
    const double g = schrodinger_green_threshold(rep.n, d.norm());
    return make_kernel_value(g * m * (rep.beta() + double(sign) * rep.identity()) + r00.value);
}

BlowupExpansion massive_blowup_n2(const CliffordRep& rep, double m, cplx z, const Eigen::VectorXd& d) {
    if (rep.n != 2) throw ValidationError("blowup expansion applies to n = 2 only");
    if (!(m > 0)) throw ValidationError("massive kernel requires m > 0");
    const cplx k2 = z * z - m * m;
    if (!(std::abs(k2) > 0.0 && std::abs(k2) < 1e-2))
        throw ValidationError("blowup expansion needs 0 < |z^2 - m^2| < 1e-2");
    if (d.size() != 2 || d.norm() == 0.0) throw ValidationError("nonzero planar displacement required");
    const double sign = z.real() >= 0.0 ? 1.0 : -1.0;
    const CMat proj = m * (rep.beta() + sign * rep.identity());
    const double r = d.norm();
    BlowupExpansion out;
    out.log_coefficient = -proj / (4.0 * pi);
    out.log_value = 2.0 * std::log(upper_root(k2));
    const cplx c0 = (std::log(2.0) + digamma(1.0)) / (2.0 * pi) + 0.25 * I;
    out.finite_part = (c0 - std::log(r) / (2.0 * pi)) * proj + (I / (2.0 * pi * r * r)) * alpha_dot(rep, d);
    return out;
}

}  // namespace ts
