#include "thresholdscope/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thresholdscope/errors.hpp"
#include "thresholdscope/quadrature.hpp"

namespace ts {

namespace {

constexpr double pi = std::numbers::pi;

double omega(int n) { return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n); }

void check_alpha(double alpha, int n) {
    if (n < 1) throw ValidationError("dimension must be positive");
    if (!(alpha > 0.0 && alpha < n)) throw ValidationError("Riesz order must satisfy 0 < alpha < n");
}

Eigen::VectorXd unit(int n) { return Eigen::VectorXd::Unit(n, 0); }

}  // namespace

double riesz_gamma(double alpha, int n) {
    check_alpha(alpha, n);
    return std::pow(pi, 0.5 * n) * std::pow(2.0, alpha) * std::tgamma(0.5 * alpha) / std::tgamma(0.5 * (n - alpha));
}

DimensionConstants dimension_constants(int n) {
    if (n < 1) throw ValidationError("dimension must be positive");
    return {n, omega(n)};
}

double ClosedFormCheck::rel_err() const { return std::abs(quadrature - closed_form) / std::abs(closed_form); }

double WeightedKernelResult::drift() const {
    return std::abs(sup_ratio_refined - sup_ratio) / std::abs(sup_ratio_refined);
}

// ---------------------------------------------------------------------------
// Radial fields

double ScalarField::operator()(double t) const {
    t = std::abs(t);
    const double rm = r_max();
    if (t > rm) {
        const double edge = (*this)(rm);
        return edge * std::pow(rm / t, decay);
    }
    auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
    std::size_t p = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - breaks.begin() - 1));
    p = std::min(p, breaks.size() - 2);
    const std::size_t base = p * order;
    double sum = 0;
    for (int i = 0; i < order; ++i) {
        double l = 1;
        const double xi = r[base + i];
        for (int j = 0; j < order; ++j)
            if (j != i) l *= (t - r[base + j]) / (xi - r[base + j]);
        sum += l * values[base + i];
    }
    return sum;
}

ScalarField make_radial_field(int n, const std::function<double(double)>& f, double decay, const FieldGrid& g) {
    if (n < 1) throw ValidationError("dimension must be positive");
    if (!(g.r_max > 0 && g.h > 0 && g.order >= 2)) throw ValidationError("invalid field grid");
    ScalarField out;
    out.n = n;
    out.order = g.order;
    out.decay = decay;
    out.breaks = graded_breaks(0.0, g.r_max, g.h, 0.25);
    const Rule1D rr = composite_rule(out.breaks, g.order);
    const double om = omega(n);
    out.r = rr.x;
    for (std::size_t i = 0; i < rr.size(); ++i) {
        out.weights.push_back(om * std::pow(rr.x[i], n - 1) * rr.w[i]);
        out.values.push_back(f(rr.x[i]));
    }
    return out;
}

ScalarField riesz_apply(const ScalarField& f, double alpha, int level) {
    const int n = f.n;
    check_alpha(alpha, n);
    if (!(f.decay > alpha)) throw ValidationError("divergent tail: field decay must exceed alpha");
    ScalarField out = f;
    out.decay = n - alpha;  // generic decay of a Riesz potential of an integrable field
    if (f.decay < n) out.decay = f.decay - alpha;
    const double g = riesz_gamma(alpha, n);
    const bool zero = std::all_of(f.values.begin(), f.values.end(), [](double v) { return v == 0.0; });
    for (std::size_t i = 0; i < f.r.size(); ++i) {
        if (zero) {
            out.values[i] = 0.0;
            continue;
        }
        const Eigen::VectorXd x = f.r[i] * unit(n);
        PolarRuleOptions opt;
        opt.origin = x;
        opt.decay = n - alpha + std::min(f.decay, 1e3);
        opt.level = level;
        opt.axisymmetric = true;
        opt.scale = std::max(0.25, 0.5 * (f.breaks[1] - f.breaks[0]));
        std::vector<Center> centers{Center{x, alpha - n}};
        if (f.r[i] > 0) centers.push_back(Center{Eigen::VectorXd::Zero(n), 0.0});
        const NodeSet rule = polar_rule(n, centers, opt);
        const double v = integrate(rule, [&](const auto& y) { return std::pow((y - x).norm(), alpha - n) * f(y.norm()); }, 0.0);
        out.values[i] = v / g;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form identities

ClosedFormCheck beta_integral(double alpha, double beta, int n, int level) {
    check_alpha(alpha, n);
    check_alpha(beta, n);
    if (!(alpha + beta < n)) throw ValidationError("beta integral requires alpha + beta < n");
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n), e = unit(n);
    PolarRuleOptions opt;
    opt.origin = zero;
    opt.decay = 2.0 * n - alpha - beta;
    opt.level = level;
    opt.axisymmetric = true;
    const NodeSet rule = polar_rule(n, {Center{zero, beta - n}, Center{e, alpha - n}}, opt);
    const double q = integrate(
        rule, [&](const auto& y) { return std::pow((e - y).norm(), alpha - n) * std::pow(y.norm(), beta - n); }, 0.0);
    return {q, riesz_gamma(alpha, n) * riesz_gamma(beta, n) / riesz_gamma(alpha + beta, n)};
}

ClosedFormCheck composition_check(double alpha, double beta, int n, const Eigen::VectorXd& x, const Eigen::VectorXd& w,
                                  int level) {
    check_alpha(alpha, n);
    check_alpha(beta, n);
    if (!(alpha + beta < n)) throw ValidationError("composition requires alpha + beta < n");
    if (x.size() != n || w.size() != n) throw ValidationError("point dimension does not match n");
    const double dist = (x - w).norm();
    if (dist == 0.0) throw ValidationError("composition requires x != w");
    PolarRuleOptions opt;
    opt.origin = x;
    opt.decay = 2.0 * n - alpha - beta;
    opt.level = level;
    opt.axisymmetric = true;
    opt.scale = dist;
    const NodeSet rule = polar_rule(n, {Center{x, alpha - n}, Center{w, beta - n}}, opt);
    const double q = integrate(
        rule, [&](const auto& y) { return std::pow((x - y).norm(), alpha - n) * std::pow((y - w).norm(), beta - n); },
        0.0);
    const double c = riesz_gamma(alpha, n) * riesz_gamma(beta, n) / riesz_gamma(alpha + beta, n);
    return {q, c * std::pow(dist, alpha + beta - n)};
}

// ---------------------------------------------------------------------------
// Weighted kernel bound

double weighted_kernel_envelope(int n, double k, double l, double beta, double dist) {
    if (dist <= 1.0) return std::pow(dist, -std::max(0.0, k + l - n));
    return std::pow(dist, -std::min({k, l, k + l + beta - n}));
}

WeightedKernelResult weighted_kernel_bound(int n, double k, double l, double beta, double eps,
                                           const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& probes,
                                           int level) {
    if (n < 1) throw ValidationError("dimension must be positive");
    if (!(k >= 0 && k < n && l >= 0 && l < n)) throw ValidationError("need k, l in [0, n)");
    if (!(beta > 0 && eps > 0)) throw ValidationError("need beta, eps > 0");
    if (!(k + l + beta >= n)) throw ValidationError("need k + l + beta >= n");
    if (k + l == n) throw ValidationError("need k + l != n");
    if (probes.empty()) throw ValidationError("no probe points");

    auto one = [&](const Eigen::VectorXd& x1, const Eigen::VectorXd& x2, int lev) {
        if (x1.size() != n || x2.size() != n) throw ValidationError("probe dimension does not match n");
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
        std::vector<Center> centers;
        const bool same = (x1 - x2).norm() == 0.0;
        if (same && k + l > n) throw ValidationError("coincident probes with k + l > n diverge");
        centers.push_back({x1, same ? -(k + l) : -k});
        if (!same && l > 0) centers.push_back({x2, -l});
        if (x1.norm() > 0 && (same || (x2 - zero).norm() > 0)) centers.push_back({zero, 0.0});
        // Rotational symmetry about a line holds when all special points are collinear.
        bool collinear = true;
        Eigen::VectorXd axis;
        for (const auto& c : centers) {
            const Eigen::VectorXd v = c.x - x1;
            if (v.norm() == 0) continue;
            if (axis.size() == 0) axis = v.normalized();
            else if ((v - v.dot(axis) * axis).norm() > 1e-10 * v.norm()) collinear = false;
        }
        PolarRuleOptions opt;
        opt.origin = x1;
        opt.decay = k + l + beta + eps;
        opt.level = lev;
        opt.axisymmetric = collinear || n > 3;
        const NodeSet rule = polar_rule(n, centers, opt);
        return integrate(
            rule,
            [&](const auto& y) {
                const double d1 = (x1 - y).norm(), d2 = (y - x2).norm();
                return std::pow(d1, -k) * std::pow(1.0 + y.squaredNorm(), -0.5 * (beta + eps)) *
                       (l > 0 ? std::pow(d2, -l) : 1.0);
            },
            0.0);
    };

    WeightedKernelResult out;
    for (const auto& [x1, x2] : probes) {
        const double v = one(x1, x2, level);
        const double env = weighted_kernel_envelope(n, k, l, beta, (x1 - x2).norm());
        out.integrals.push_back(v);
        out.ratios.push_back(v / env);
        out.sup_ratio = std::max(out.sup_ratio, v / env);
        const double vr = one(x1, x2, level + 1);
        out.sup_ratio_refined = std::max(out.sup_ratio_refined, vr / env);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Stein-Weiss probe

double spherical_mean_power(int n, double s, double r, double t) {
    if (n == 3) {
        if (std::abs(s + 2.0) < 1e-14) return 2.0 * pi / (r * t) * std::log((r + t) / std::abs(r - t));
        return 2.0 * pi * (std::pow(r + t, s + 2) - std::pow(std::abs(r - t), s + 2)) / ((s + 2) * r * t);
    }
    if (n < 2) throw ValidationError("spherical means need n >= 2");
    // theta = pi u^q grades the nodes towards the possible singularity at theta = 0.
    const double a = s + n - 1;
    if (!(a > 0) && std::abs(r - t) == 0.0) throw ValidationError("spherical mean diverges on the diagonal");
    const double q = a > 0 ? std::max(1.0, std::ceil(a) / a) : 4.0;
    const Rule1D ur = composite_rule({0.0, 1.0 / 64, 1.0 / 16, 0.25, 0.5, 1.0}, 16);
    const double om = omega(n - 1);
    double sum = 0;
    for (std::size_t i = 0; i < ur.size(); ++i) {
        const double u = ur.x[i];
        const double th = pi * std::pow(u, q);
        const double jac = pi * q * std::pow(u, q - 1);
        const double d2 = std::max(r * r + t * t - 2 * r * t * std::cos(th), 0.0);
        sum += ur.w[i] * jac * std::pow(d2, 0.5 * s) * std::pow(std::sin(th), n - 2);
    }
    return om * sum;
}

SteinWeissResult stein_weiss_norm(int n, double c, double d, double p, SteinWeissVariant variant, double R,
                                  const SteinWeissGrid& g) {
    if (!(c + d > 0)) throw ValidationError("Stein-Weiss kernel requires c + d > 0");
    if (!(p > 1.0) || !std::isfinite(p)) throw ValidationError("p must lie in (1, inf)");
    if (!(R > g.r_min)) throw ValidationError("truncation radius must exceed the inner grid radius");
    if (n < 2) throw ValidationError("dimension must be >= 2");
    const double s = c + d - n;
    const bool hom = variant == SteinWeissVariant::homogeneous;
    auto wa = [&](double r) { return hom ? std::pow(r, -c) : std::pow(1.0 + r, -c); };
    auto wb = [&](double r) { return hom ? std::pow(r, -d) : std::pow(1.0 + r, -d); };

    std::vector<double> br{0.0};
    const int np = std::max(1, static_cast<int>(std::ceil(g.panels_per_decade * std::log10(R / g.r_min))));
    for (int k = 0; k <= np; ++k) br.push_back(g.r_min * std::pow(R / g.r_min, double(k) / np));
    const Rule1D rr = composite_rule(br, g.order);
    const int m = static_cast<int>(rr.size());
    const double om = omega(n);
    Eigen::VectorXd W(m), r(m);
    for (int i = 0; i < m; ++i) {
        r[i] = rr.x[i];
        W[i] = om * std::pow(r[i], n - 1) * rr.w[i];
    }

    // A f approximates Int_0^R a(r) M(r,t) b(t) f(t) t^{n-1} dt; the diagonal absorbs the singular part.
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            A(i, j) = i == j ? 0.0 : wa(r[i]) * spherical_mean_power(n, s, r[i], r[j]) * wb(r[j]) * (W[j] / om);
    for (int i = 0; i < m; ++i) {
        std::vector<double> b;
        const double x = r[i];
        for (int k = 60; k >= 1; --k) b.push_back(0.5 * x * std::pow(0.5, k));
        for (int k = 1; k <= 36; ++k) b.push_back(x * (1.0 - std::pow(0.5, k)));
        b.push_back(x);
        for (int k = 36; k >= 1; --k) b.push_back(x * (1.0 + std::pow(0.5, k)));
        for (double y = 2.0 * x; y < R; y *= 1.5) b.push_back(y);
        b.push_back(R);
        std::vector<double> bb{0.0};
        for (double v : b)
            if (v > bb.back() && v <= R) bb.push_back(v);
        if (bb.back() < R) bb.push_back(R);
        const Rule1D q = composite_rule(bb, 8);
        double exact = 0;
        for (std::size_t k = 0; k < q.size(); ++k)
            exact += q.w[k] * spherical_mean_power(n, s, x, q.x[k]) * wb(q.x[k]) * std::pow(q.x[k], n - 1);
        exact *= wa(x);
        double off = 0;
        for (int j = 0; j < m; ++j) off += A(i, j);
        A(i, i) = exact - off;
    }

    SteinWeissResult out{0.0, 0, m};
    if (std::abs(p - 2.0) < 1e-14) {
        const Eigen::VectorXd sw = W.cwiseSqrt();
        const Eigen::MatrixXd B = sw.asDiagonal() * A * sw.cwiseInverse().asDiagonal();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(B);
        out.norm = svd.singularValues()(0);
        return out;
    }
    // Boyd's power method for the weighted l^p -> l^p norm.
    const double pp = p / (p - 1.0);
    auto lp = [&](const Eigen::VectorXd& v, double e) {
        double acc = 0;
        for (int i = 0; i < m; ++i) acc += W[i] * std::pow(std::abs(v[i]), e);
        return std::pow(acc, 1.0 / e);
    };
    auto dual = [&](const Eigen::VectorXd& v, double e) {
        const double nv = lp(v, e);
        Eigen::VectorXd out(m);
        for (int i = 0; i < m; ++i) out[i] = std::copysign(std::pow(std::abs(v[i]) / nv, e - 1.0), v[i]);
        return out;
    };
    Eigen::VectorXd f = Eigen::VectorXd::Ones(m);
    f /= lp(f, p);
    double est = 0;
    for (int it = 1; it <= 500; ++it) {
        const Eigen::VectorXd gvec = A * f;
        const double val = lp(gvec, p);
        const Eigen::VectorXd y = dual(gvec, p);
        // Adjoint with respect to the weighted pairing sum W_i u_i v_i.
        const Eigen::VectorXd z = W.cwiseInverse().asDiagonal() * (A.transpose() * (W.asDiagonal() * y));
        f = dual(z, pp);
        out.iterations = it;
        if (std::abs(val - est) <= 1e-10 * val) {
            est = val;
            break;
        }
        est = val;
    }
    out.norm = est;
    return out;
}

}  // namespace ts
