#include "thresholdscope/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "thresholdscope/errors.hpp"

namespace ts {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

cplx checked_argument(cplx z) {
    if (z == cplx(0.0, 0.0)) throw ValidationError("hankel1: zero argument");
    if (z.imag() < 0.0) throw ValidationError("hankel1: argument in the lower half-plane");
    // Normalize a negative zero so the principal branch picks arg = pi on the negative axis.
    return {z.real(), z.imag() == 0.0 ? 0.0 : z.imag()};
}

double factorial(int k) { return std::tgamma(k + 1.0); }

// Y_n by the logarithmic power series.
cplx bessel_y_integer_series(int n, cplx z) {
    const cplx h = 0.5 * z;
    const cplx q = h * h;
    cplx finite(0.0, 0.0);
    if (n > 0) {
        cplx qk(1.0, 0.0);
        for (int k = 0; k < n; ++k) {
            finite += factorial(n - k - 1) / factorial(k) * qk;
            qk *= q;
        }
        finite *= std::pow(h, -n);
    }
    cplx tail(0.0, 0.0);
    cplx term = std::pow(h, n) / factorial(n);  // (z/2)^n (-q)^k / (k! (n+k)!)
    const double eps = std::numeric_limits<double>::epsilon();
    for (int k = 0; k < 200; ++k) {
        const cplx add = (boost::math::digamma(k + 1.0) + boost::math::digamma(n + k + 1.0)) * term;
        tail += add;
        if (k > 2 && std::abs(add) < eps * std::abs(tail)) break;
        term *= -q / ((k + 1.0) * (n + k + 1.0));
    }
    return -finite / pi + (2.0 / pi) * std::log(h) * bessel_j_series(n, z) - tail / pi;
}

}  // namespace

double gamma_fn(double w) {
    if (!(w > 0.0)) throw ValidationError("gamma_fn: argument must be positive");
    return std::tgamma(w);
}

double digamma(double w) {
    if (!(w > 0.0)) throw ValidationError("digamma: argument must be positive");
    return boost::math::digamma(w);
}

HankelOrder::HankelOrder(double nu) {
    const double t = 2.0 * nu;
    if (!(nu >= 0.0) || std::abs(t - std::round(t)) > 1e-12)
        throw ValidationError("Hankel order must be a nonnegative multiple of 1/2, got " + std::to_string(nu));
    twice = static_cast<int>(std::lround(t));
}

HankelOrder HankelOrder::from_twice(int two_nu) {
    if (two_nu < 0) throw ValidationError("Hankel order must be nonnegative");
    HankelOrder o;
    o.twice = two_nu;
    return o;
}

cplx bessel_j_series(double nu, cplx z) {
    const cplx h = 0.5 * z;
    const cplx q = -h * h;
    // For negative non-integer nu, 1/Gamma(k + nu + 1) is finite and tgamma handles it.
    cplx term = std::pow(h, nu) / std::tgamma(nu + 1.0);
    cplx sum = term;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int k = 1; k < 300; ++k) {
        term *= q / (k * (k + nu));
        sum += term;
        if (k > 2 && std::abs(term) < eps * std::abs(sum)) break;
    }
    return sum;
}

cplx hankel1_closed_form(HankelOrder nu, cplx z) {
    z = checked_argument(z);
    if (!nu.half_integer()) throw ValidationError("closed form exists only for half-integer orders");
    const int l = (nu.twice - 1) / 2;
    cplx sum(0.0, 0.0);
    const cplx x = I / (2.0 * z);
    cplx xk(1.0, 0.0);
    for (int k = 0; k <= l; ++k) {
        sum += xk * (factorial(l + k) / (factorial(k) * factorial(l - k)));
        xk *= x;
    }
    return std::sqrt(2.0 / (pi * z)) * std::pow(-I, l + 1) * std::exp(I * z) * sum;
}

cplx hankel1_series(HankelOrder nu, cplx z) {
    z = checked_argument(z);
    const double v = nu.value();
    if (nu.half_integer()) {
        // sin(v pi) = +-1 for half-integer v.
        const double s = ((nu.twice - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
        return bessel_j_series(v, z) - I * bessel_j_series(-v, z) / s;
    }
    const int n = nu.twice / 2;
    return bessel_j_series(n, z) + I * bessel_y_integer_series(n, z);
}

cplx hankel1_asymptotic(HankelOrder nu, cplx z, double* rel_error_estimate) {
    z = checked_argument(z);
    const double v = nu.value();
    const double mu = 4.0 * v * v;
    cplx sum(1.0, 0.0);
    cplx term(1.0, 0.0);
    double last = 1.0;
    double est = 0.0;
    for (int k = 1; k < 200; ++k) {
        const double c = (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k);
        const cplx next = term * c * I / z;
        const double mag = std::abs(next);
        if (mag == 0.0) { est = 0.0; break; }
        if (mag > last && 2.0 * k - 1 > 2.0 * v) { est = last; break; }  // smallest term reached
        term = next;
        sum += term;
        last = mag;
        est = mag;
        if (mag < 1e-17 * std::abs(sum)) break;
    }
    if (rel_error_estimate) *rel_error_estimate = est;
    return std::sqrt(2.0 / (pi * z)) * std::exp(I * (z - 0.5 * v * pi - 0.25 * pi)) * sum;
}

HankelResult hankel1_eval(HankelOrder nu, cplx z) {
    z = checked_argument(z);
    if (nu.half_integer()) return {hankel1_closed_form(nu, z), HankelPath::closed_form, 1e-15};
    if (std::abs(z) <= kHankelSwitchover) return {hankel1_series(nu, z), HankelPath::series, 1e-12};
    double est = 0.0;
    const cplx v = hankel1_asymptotic(nu, z, &est);
    return {v, HankelPath::asymptotic, est};
}

cplx hankel1(HankelOrder nu, cplx z) { return hankel1_eval(nu, z).value; }

cplx hankel1_deriv(HankelOrder nu, cplx z) {
    z = checked_argument(z);
    return -hankel1(HankelOrder::from_twice(nu.twice + 2), z) + (nu.value() / z) * hankel1(nu, z);
}

AsymptoticTerm hankel1_small_asym(HankelOrder nu, cplx z) {
    z = checked_argument(z);
    const bool outside = std::abs(z) >= 0.1;
    if (nu.twice == 0) return {(2.0 * I / pi) * std::log(z), outside};
    const double v = nu.value();
    return {-(I / pi) * std::pow(2.0, v) * std::tgamma(v) * std::pow(z, -v), outside};
}

cplx hankel1_large_asym(HankelOrder nu, cplx z) {
    z = checked_argument(z);
    const double v = nu.value();
    return std::sqrt(2.0 / pi) / std::sqrt(z) * std::exp(I * (z - 0.5 * v * pi - 0.25 * pi));
}

}  // namespace ts
