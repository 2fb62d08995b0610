#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "thresholdscope/errors.hpp"
#include "thresholdscope/greens.hpp"
#include "thresholdscope/quadrature.hpp"
#include "thresholdscope/special.hpp"

using namespace ts;
using std::numbers::pi;
using Eigen::VectorXd;

namespace {

const cplx I(0, 1);

double rel(const CMat& a, const CMat& b) { return (a - b).norm() / b.norm(); }

// (-i alpha . grad_x + m beta + z) g0(k^2; |x - y|) by central differences in x.
CMat factorized(const CliffordRep& rep, double m, cplx z, const VectorXd& x, const VectorXd& y) {
    const cplx k2 = z * z - m * m;
    const double h = 1e-4;
    CMat out = (m * rep.beta() + z * rep.identity()) * schrodinger_green(rep.n, k2, (x - y).norm());
    for (int j = 0; j < rep.n; ++j) {
        VectorXd e = VectorXd::Unit(rep.n, j) * h;
        const cplx d = (schrodinger_green(rep.n, k2, (x + e - y).norm()) - schrodinger_green(rep.n, k2, (x - e - y).norm())) /
                       (2 * h);
        out += -I * d * rep.alpha(j);
    }
    return out;
}

}  // namespace

TEST_CASE("Schrodinger kernel examples") {
    CHECK(std::abs(schrodinger_green(1, -1.0, 0.0) - cplx(0.5, 0)) < 1e-15);
    CHECK(std::abs(schrodinger_green(3, -1.0, 1.0) - std::exp(-1.0) / (4 * pi)) < 1e-14);
    CHECK(std::abs(schrodinger_green(3, -1.0, 1.0).real() - 0.0292749158) < 1e-9);
    const cplx g = schrodinger_green(3, -1e-6, 1.0);
    CHECK(std::abs(g - 1.0 / (4 * pi)) / (1.0 / (4 * pi)) < 1e-3);
    // Odd dimensions reduce to e^{i w r} times a polynomial in 1/(wr).
    const cplx z(2.0, 0.7);
    const cplx w = upper_root(z);
    CHECK(std::abs(schrodinger_green(3, z, 1.3) - std::exp(I * w * 1.3) / (4 * pi * 1.3)) < 1e-14);
    CHECK_THROWS_AS(schrodinger_green(3, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(schrodinger_green(3, -1.0, 0.0), ValidationError);
}

TEST_CASE("positive real z is the upper boundary value") {
    const cplx a = schrodinger_green(3, 4.0, 1.0);
    const cplx b = schrodinger_green(3, cplx(4.0, 1e-12), 1.0);
    CHECK(std::abs(a - b) < 1e-10);
    CHECK(upper_root(cplx(4.0, -0.0)) == cplx(2.0, 0.0));
    CHECK(upper_root(cplx(-4.0, 0.0)) == cplx(0.0, 2.0));
}

TEST_CASE("zero-energy Schrodinger kernel") {
    CHECK(schrodinger_green_threshold(3, 1.0) == doctest::Approx(1 / (4 * pi)).epsilon(1e-14));
    CHECK(schrodinger_green_threshold(5, 1.0) == doctest::Approx(1 / (8 * pi * pi)).epsilon(1e-14));
    CHECK(schrodinger_green_threshold(4, 2.0) == doctest::Approx(1 / (16 * pi * pi)).epsilon(1e-14));
    for (int n = 3; n <= 12; ++n)
        for (double r : {0.3, 1.0, 2.5})
            CHECK(std::abs(schrodinger_green_threshold(n, r) / schrodinger_green_threshold_gamma_form(n, r) - 1) <= 1e-12);
    CHECK(sphere_area(2) == doctest::Approx(2 * pi).epsilon(1e-12));
    CHECK(sphere_area(3) == doctest::Approx(4 * pi).epsilon(1e-12));
    CHECK_THROWS_AS(schrodinger_green_threshold(2, 1.0), ValidationError);
    // Continuity at z = 0 for n = 4, 5 as well.
    for (int n : {4, 5})
        CHECK(std::abs(schrodinger_green(n, cplx(-1e-8, 0), 1.0) / schrodinger_green_threshold(n, 1.0) - 1.0) < 1e-3);
}

TEST_CASE("n = 1, 2 threshold expansions") {
    SUBCASE("n = 2 singular term and remainder") {
        const auto e = schrodinger_threshold_expansion(2, 1e-6, 1.0);
        CHECK(std::abs(e.singular - (-std::log(5e-4) / (2 * pi))) < 1e-14);
        const auto d4 = std::abs(schrodinger_green(2, 1e-4, 1.0) - (schrodinger_threshold_expansion(2, 1e-4, 1.0).singular +
                                                                    schrodinger_threshold_expansion(2, 1e-4, 1.0).constant));
        const auto d6 = std::abs(schrodinger_green(2, 1e-6, 1.0) - (e.singular + e.constant));
        CHECK(d6 * 10 <= d4);
    }
    SUBCASE("n = 1") {
        const auto e = schrodinger_threshold_expansion(1, 1e-6, 1.0);
        CHECK(std::abs(e.constant + 0.5) < 1e-15);
        CHECK(std::abs(e.singular - 0.5 * I / 1e-3) < 1e-9);
        CHECK(std::abs(schrodinger_threshold_expansion(1, -1e-6, 1.0).singular - 0.5 * I / cplx(0, 1e-3)) < 1e-9);
        const double d4 = std::abs(schrodinger_green(1, 1e-4, 1.0) - (schrodinger_threshold_expansion(1, 1e-4, 1.0).singular +
                                                                      schrodinger_threshold_expansion(1, 1e-4, 1.0).constant));
        const double d6 = std::abs(schrodinger_green(1, 1e-6, 1.0) - (e.singular + e.constant));
        // Remainder is O(z^{1/2}): a hundredfold decrease in z gives a tenfold decrease.
        CHECK(d6 * 9 <= d4);
    }
    CHECK_THROWS_AS(schrodinger_threshold_expansion(2, 0.5, 1.0), ValidationError);
    CHECK_THROWS_AS(schrodinger_threshold_expansion(3, 1e-4, 1.0), ValidationError);
}

TEST_CASE("massless threshold kernel") {
    const auto r2 = build_clifford(2);
    const auto r3 = build_clifford(3);
    const auto k2 = massless_threshold_kernel(r2, VectorXd::Unit(2, 0));
    CHECK((k2.value - I / (2 * pi) * r2.alpha(0)).norm() < 1e-15);
    CHECK(massless_threshold_kernel(r3, VectorXd::Unit(3, 2)).opnorm == doctest::Approx(1 / (4 * pi)).epsilon(1e-14));
    std::mt19937 gen(5);
    std::normal_distribution<double> nd;
    for (int n = 2; n <= 8; ++n) {
        const auto rep = build_clifford(n);
        VectorXd d(n);
        for (int j = 0; j < n; ++j) d[j] = nd(gen);
        const auto k = massless_threshold_kernel(rep, d);
        const auto k_2 = massless_threshold_kernel(rep, 2 * d);
        const double expect = std::tgamma(0.5 * n) / (2 * std::pow(pi, 0.5 * n)) * std::pow(d.norm(), 1 - n);
        CHECK(std::abs(k.opnorm - expect) <= 1e-10 * expect);
        CHECK(std::abs(make_kernel_value(k.value).opnorm - expect) <= 1e-10 * expect);
        CHECK(k_2.opnorm == doctest::Approx(std::pow(2.0, 1 - n) * k.opnorm).epsilon(1e-12));
        // R00(d)^* = R00(-d)
        CHECK((k.value.adjoint() - massless_threshold_kernel(rep, -d).value).norm() < 1e-14);
    }
    CHECK_THROWS_AS(massless_threshold_kernel(r3, VectorXd::Zero(3)), ValidationError);
}

TEST_CASE("massless kernel agrees with -i alpha . grad g0 + z g0") {
    for (int n : {2, 3, 4, 5}) {
        const auto rep = build_clifford(n);
        VectorXd x = VectorXd::Zero(n), y = VectorXd::Zero(n);
        x[0] = 0.4;
        y[n - 1] = -0.7;
        for (cplx z : {cplx(0, 1), cplx(1.5, 0.3), cplx(-0.8, 0.2)}) {
            const auto g = massless_dirac_green(rep, z, x, y);
            INFO("n = " << n << " z = " << z);
            CHECK(rel(g.value, factorized(rep, 0.0, z, x, y)) <= 1e-4);
        }
    }
    const auto rep = build_clifford(3);
    CHECK_THROWS_AS(massless_dirac_green(rep, cplx(0, -1), VectorXd::Zero(3), VectorXd::Unit(3, 0)), ValidationError);
    CHECK_THROWS_AS(massless_dirac_green(rep, 0.0, VectorXd::Zero(3), VectorXd::Unit(3, 0)), ValidationError);
}

TEST_CASE("massless kernel tends to the threshold kernel") {
    const auto rep = build_clifford(3);
    const VectorXd x = VectorXd::Unit(3, 0), y = VectorXd::Zero(3);
    const auto r00 = massless_threshold_kernel(rep, x - y);
    const double e5 = make_kernel_value(massless_dirac_green(rep, cplx(0, 1e-5), x, y).value - r00.value).opnorm;
    CHECK(e5 <= 5e-3 * r00.opnorm);
    for (int n : {2, 3}) {
        const auto rp = build_clifford(n);
        const VectorXd d = VectorXd::Unit(n, 0);
        const auto t = massless_threshold_kernel(rp, d);
        double prev = 1e300;
        for (double eps : {1e-2, 1e-4, 1e-6}) {
            const auto g = massless_dirac_green(rp, cplx(0, eps), d, VectorXd::Zero(n));
            const double err = make_kernel_value(g.value - t.value).opnorm;
            CHECK(err < prev);
            prev = err;
        }
    }
}

TEST_CASE("massive kernel: factorization, limits") {
    SUBCASE("ten-point factorization sample, n = 2, 3") {
        std::mt19937 gen(11);
        std::uniform_real_distribution<double> u(-1, 1);
        int count = 0;
        for (int n : {2, 3}) {
            const auto rep = build_clifford(n);
            for (int s = 0; s < 5; ++s) {
                VectorXd x(n), y(n);
                for (int j = 0; j < n; ++j) x[j] = u(gen), y[j] = u(gen);
                const cplx z(0.9 * u(gen), 0.2 + 0.5 * std::abs(u(gen)));
                const double m = 1.0;
                INFO("n = " << n << " z = " << z);
                CHECK(rel(massive_dirac_green(rep, m, z, x, y).value, factorized(rep, m, z, x, y)) <= 1e-4);
                ++count;
            }
        }
        CHECK(count == 10);
        // z = 0 lies in the gap and is admissible.
        const auto rep = build_clifford(3);
        const VectorXd x = VectorXd::Unit(3, 1), y = VectorXd::Zero(3);
        CHECK(rel(massive_dirac_green(rep, 1.0, 0.0, x, y).value, factorized(rep, 1.0, 0.0, x, y)) <= 1e-4);
    }
    SUBCASE("z -> m from above converges to the threshold kernel") {
        const auto rep = build_clifford(3);
        const VectorXd d = VectorXd::Unit(3, 0);
        const auto t = massive_threshold_kernel(rep, 1.0, +1, d);
        double prev = 1e300;
        for (double eps : {1e-2, 1e-4, 1e-6}) {
            const auto g = massive_dirac_green(rep, 1.0, cplx(1.0, eps), d, VectorXd::Zero(3));
            const double err = make_kernel_value(g.value - t.value).opnorm;
            CHECK(err < prev);
            prev = err;
        }
        CHECK(prev < 1e-2 * t.opnorm);
        const auto tm = massive_threshold_kernel(rep, 1.0, -1, d);
        const auto gm = massive_dirac_green(rep, 1.0, cplx(-1.0, 1e-8), d, VectorXd::Zero(3));
        CHECK(make_kernel_value(gm.value - tm.value).opnorm < 1e-3 * tm.opnorm);
    }
    SUBCASE("m -> 0 recovers the massless kernel") {
        const auto rep = build_clifford(3);
        const VectorXd x = VectorXd::Unit(3, 2) * 0.8, y = VectorXd::Zero(3);
        const auto g0 = massless_dirac_green(rep, cplx(0, 1), x, y);
        const double e2 = rel(massive_dirac_green(rep, 1e-2, cplx(0, 1), x, y).value, g0.value);
        const double e4 = rel(massive_dirac_green(rep, 1e-4, cplx(0, 1), x, y).value, g0.value);
        CHECK(e4 < e2);
        CHECK(e4 < 1e-4);
    }
    SUBCASE("errors") {
        const auto rep = build_clifford(3);
        const VectorXd x = VectorXd::Unit(3, 0), y = VectorXd::Zero(3);
        CHECK_THROWS_AS(massive_dirac_green(rep, 1.0, 2.0, x, y), ValidationError);
        CHECK_THROWS_AS(massive_dirac_green(rep, 0.0, cplx(0, 1), x, y), ValidationError);
        CHECK_THROWS_AS(massive_threshold_kernel(build_clifford(2), 1.0, 1, VectorXd::Unit(2, 0)), ValidationError);
    }
}

TEST_CASE("massive threshold kernel") {
    const auto rep = build_clifford(3);
    const VectorXd d = VectorXd::Unit(3, 0);
    const auto k = massive_threshold_kernel(rep, 1.0, +1, d);
    const CMat expect = (rep.beta() + rep.identity()) / (4 * pi) + I / (4 * pi) * rep.alpha(0);
    CHECK((k.value - expect).cwiseAbs().maxCoeff() <= 1e-12);
    // Entrywise identity r00 m (beta +- I) + R00 at arbitrary displacement.
    VectorXd dd(3);
    dd << 0.3, -1.1, 0.5;
    for (int s : {1, -1}) {
        const CMat lhs = massive_threshold_kernel(rep, 2.5, s, dd).value;
        const CMat rhs = schrodinger_green_threshold(3, dd.norm()) * 2.5 * (rep.beta() + double(s) * rep.identity()) +
                         massless_threshold_kernel(rep, dd).value;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }
    // m -> 0
    CHECK(rel(massive_threshold_kernel(rep, 1e-9, 1, dd).value, massless_threshold_kernel(rep, dd).value) < 1e-7);
    // m (beta - I) annihilates the beta = +1 eigenspace.
    Eigen::SelfAdjointEigenSolver<CMat> es(rep.beta());
    const Eigen::VectorXcd v = es.eigenvectors().col(rep.N - 1);
    REQUIRE(std::abs(es.eigenvalues()(rep.N - 1) - 1.0) < 1e-12);
    const CMat first = schrodinger_green_threshold(3, 1.0) * (rep.beta() - rep.identity());
    CHECK((first * v).norm() < 1e-14);
}

TEST_CASE("n = 2 massive blowup near +-m") {
    const auto rep = build_clifford(2);
    const VectorXd d = VectorXd::Unit(2, 0) * 0.7;
    const auto e = massive_blowup_n2(rep, 1.0, cplx(1.0, 1e-6), d);
    CHECK((e.log_coefficient + (rep.beta() + rep.identity()) / (4 * pi)).norm() < 1e-15);
    const CMat g = massive_dirac_green(rep, 1.0, cplx(1.0, 1e-6), d, VectorXd::Zero(2)).value;
    CHECK((e.log_coefficient * e.log_value).norm() > 0.5 * g.norm());
    // Remainder shrinks as z^2 - m^2 decreases.
    auto remainder = [&](double eps, double sign) {
        // z^2 - m^2 = i eps approximately.
        const cplx z = sign * std::sqrt(cplx(1.0, sign > 0 ? eps : -eps));
        const cplx zz(z.real(), std::abs(z.imag()));
        const auto ex = massive_blowup_n2(rep, 1.0, zz, d);
        return (massive_dirac_green(rep, 1.0, zz, d, VectorXd::Zero(2)).value - ex.expansion()).norm();
    };
    CHECK(remainder(1e-6, 1) < remainder(1e-4, 1));
    CHECK(remainder(1e-6, -1) < remainder(1e-4, -1));
    CHECK(remainder(1e-6, 1) < 1e-3);
    const auto em = massive_blowup_n2(rep, 1.0, cplx(-1.0, 1e-6), d);
    CHECK((em.log_coefficient + (rep.beta() - rep.identity()) / (4 * pi)).norm() < 1e-15);
    CHECK_THROWS_AS(massive_blowup_n2(rep, 1.0, cplx(0.5, 0.1), d), ValidationError);
}

TEST_CASE("weak form of -Delta r00 = delta, n = 3") {
    // phi = exp(-|y|^2), -Delta phi = (6 - 4|y|^2) phi
    for (const VectorXd& x : {VectorXd(VectorXd::Zero(3)), VectorXd(VectorXd::Unit(3, 0) * 0.5),
                              VectorXd(Eigen::Vector3d(0.3, -0.9, 0.4))}) {
        PolarRuleOptions opt;
        opt.origin = x;
        opt.decay = 12;
        opt.axisymmetric = true;
        std::vector<Center> centers{{x, -1.0}};
        if (x.norm() > 0) centers.push_back({VectorXd::Zero(3), 0.0});
        const NodeSet rule = polar_rule(3, centers, opt);
        const double v = integrate(
            rule,
            [&](const auto& y) {
                const double r2 = y.squaredNorm();
                return schrodinger_green_threshold(3, (x - y).norm()) * (6 - 4 * r2) * std::exp(-r2);
            },
            0.0);
        const double phi = std::exp(-x.squaredNorm());
        CHECK(std::abs(v - phi) <= 1e-2 * phi);
    }
}

TEST_CASE("weak form of -i alpha . grad R00 = delta I, n = 2, 3") {
    for (int n : {2, 3}) {
        const auto rep = build_clifford(n);
        for (int s = 0; s < 3; ++s) {
            VectorXd y = VectorXd::Zero(n);
            if (s > 0) y[0] = 0.4 * s;
            if (s == 2) y[n - 1] = -0.3;
            PolarRuleOptions opt;
            opt.origin = y;
            opt.decay = 12;
            std::vector<Center> centers{{y, 1.0 - n}};
            if (y.norm() > 0) centers.push_back({VectorXd::Zero(n), 0.0});
            const NodeSet rule = polar_rule(n, centers, opt);
            // Int i alpha_j R00(x - y) d_j phi(x) dx = phi(y) I
            const CMat v = integrate(
                rule,
                [&](const auto& x) {
                    const double r2 = x.squaredNorm();
                    const Eigen::VectorXd grad = -2.0 * x * std::exp(-r2);
                    const CMat k = massless_threshold_kernel(rep, x - y).value;
                    CMat acc = CMat::Zero(rep.N, rep.N);
                    for (int j = 0; j < n; ++j) acc += (I * grad[j]) * (rep.alpha(j) * k);
                    return acc;
                },
                CMat(CMat::Zero(rep.N, rep.N)));
            const CMat expect = std::exp(-y.squaredNorm()) * rep.identity();
            INFO("n = " << n << " sample " << s);
            CHECK(rel(v, expect) <= 1e-2);
        }
    }
}
