#pragma once

#include <complex>

namespace ts {

using cplx = std::complex<double>;

double gamma_fn(double w);
double digamma(double w);

/// Order of a Hankel function, stored as 2*nu so that half-integers are exact.
struct HankelOrder {
    int twice = 0;

    HankelOrder() = default;
    explicit HankelOrder(double nu);
    static HankelOrder from_twice(int two_nu);

    double value() const { return 0.5 * twice; }
    bool half_integer() const { return twice % 2 != 0; }
};

enum class HankelPath { closed_form, series, asymptotic };

struct HankelResult {
    cplx value;
    HankelPath path;
    double rel_error_estimate;  // truncation estimate of the chosen path
};

// |zeta| at which integer orders switch from power series to the large-argument series.
inline constexpr double kHankelSwitchover = 8.0;

HankelResult hankel1_eval(HankelOrder nu, cplx zeta);
cplx hankel1(HankelOrder nu, cplx zeta);
inline cplx hankel1(double nu, cplx zeta) { return hankel1(HankelOrder(nu), zeta); }

cplx hankel1_deriv(HankelOrder nu, cplx zeta);
inline cplx hankel1_deriv(double nu, cplx zeta) { return hankel1_deriv(HankelOrder(nu), zeta); }

// Independent evaluation paths, exposed so they can be compared with each other.
cplx hankel1_closed_form(HankelOrder nu, cplx zeta);   // half-integer orders only
cplx hankel1_series(HankelOrder nu, cplx zeta);        // J + iY power series (any half-integer multiple)
cplx hankel1_asymptotic(HankelOrder nu, cplx zeta, double* rel_error_estimate = nullptr);
cplx bessel_j_series(double nu, cplx zeta);

struct AsymptoticTerm {
    cplx value;
    bool outside_regime;  // |zeta| >= 0.1: leading term is not a reliable approximation
};

// Leading small-argument behaviour: -(i/pi) 2^nu Gamma(nu) zeta^-nu, or (2i/pi) ln(zeta) at nu = 0.
AsymptoticTerm hankel1_small_asym(HankelOrder nu, cplx zeta);
// Leading large-argument behaviour: (2/pi)^(1/2) zeta^(-1/2) exp(i(zeta - nu pi/2 - pi/4)).
cplx hankel1_large_asym(HankelOrder nu, cplx zeta);

}  // namespace ts
