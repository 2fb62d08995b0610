#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "thresholdscope/analysis.hpp"
#include "thresholdscope/clifford.hpp"
#include "thresholdscope/greens.hpp"
#include "thresholdscope/quadrature.hpp"
#include "thresholdscope/riesz.hpp"
#include "thresholdscope/special.hpp"

using namespace ts;
using std::numbers::pi;
using Eigen::VectorXd;

namespace {

const cplx I(0, 1);

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records one measured quantity against its bound.
    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (detail.tellp() > 0) detail << "; ";
        detail << what << (ok ? "" : " [FAIL]");
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

int failures = 0;

void criterion(int k, double limit_s, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.check(false, std::string("exception: ") + e.what());
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(t < limit_s, fmt("runtime %.2f s < %.0f s", t, limit_s));
    std::printf("criterion %2d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.pass;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }
double rel(const CMat& a, const CMat& b) { return (a - b).norm() / b.norm(); }

PotentialSpec well(Family f, int n) {
    PotentialSpec s;
    s.family = f;
    s.n = n;
    s.shape = SquareWell{1.0, 1.0};
    return s;
}

GridSpec radial(int nodes) {
    GridSpec g;
    g.radial_nodes = nodes;
    return g;
}

Analysis at_first_crossing(const PotentialSpec& s, double lambda_max) {
    AnalysisOptions o;
    o.sweep = Sweep{0.1, lambda_max, 1e-8};
    return analyze_threshold(s, radial(2000), o);
}

// Shared checks for a single-state or degenerate crossing: expected lambda, decay, classification and
// stability under halving the node count.
const StateReport* crossing(Outcome& o, const Analysis& a, const std::string& tag, double lambda, double lambda_tol) {
    o.check(std::abs(a.coupling / lambda - 1) <= lambda_tol,
            tag + fmt(" lambda_c %.6f vs %.6f", a.coupling, lambda));
    if (a.refinement)
        o.check(a.refinement->stable, tag + fmt(" refinement drift mu %.1e gamma %.1e", a.refinement->mu_drift,
                                                a.refinement->gamma_drift));
    if (a.report.states.empty()) {
        o.check(false, tag + " no state near -1");
        return nullptr;
    }
    return &a.report.states.front();
}

void decay_and_kind(Outcome& o, const Analysis& a, const std::string& tag, double gamma, double tol,
                    Classification kind) {
    for (const auto& st : a.report.states)
        o.check(std::abs(st.decay.gamma - gamma) <= tol,
                tag + " " + st.channel + fmt(" gamma %.4f (%.2f +- %.2f)", st.decay.gamma, gamma, tol));
    o.check(a.report.classification == kind,
            tag + " " + classification_name(a.report.classification));
    o.check(a.report.dimension_table_consistent, tag + " consistent with dimension table");
}

// (-i alpha . grad_x + m beta + z) g0(z^2 - m^2; |x - y|) by central differences.
CMat factorized(const CliffordRep& rep, double m, cplx z, const VectorXd& x, const VectorXd& y) {
    const cplx k2 = z * z - m * m;
    const double h = 1e-4;
    CMat out = (m * rep.beta() + z * rep.identity()) * schrodinger_green(rep.n, k2, (x - y).norm());
    for (int j = 0; j < rep.n; ++j) {
        const VectorXd e = VectorXd::Unit(rep.n, j) * h;
        const cplx d =
            (schrodinger_green(rep.n, k2, (x + e - y).norm()) - schrodinger_green(rep.n, k2, (x - e - y).norm())) /
            (2 * h);
        out += -I * d * rep.alpha(j);
    }
    return out;
}

void clifford_suite(Outcome& o) {
    double worst = 0;
    bool sizes = true;
    for (int n = 2; n <= 8; ++n) {
        const CliffordRep rep = build_clifford(n);
        worst = std::max({worst, anticommutator_residual(rep), hermiticity_residual(rep)});
        sizes = sizes && rep.N == (1 << ((n + 1) / 2));
    }
    o.check(worst <= 1e-12, fmt("max residual %.1e <= 1e-12 for n = 2..8", worst));
    o.check(sizes, "N = 2^floor((n+1)/2)");
}

void special_functions(Outcome& o) {
    double small = 0;
    for (double nu : {0.5, 1.0, 1.5}) {
        const HankelOrder h(nu);
        small = std::max(small, rel(hankel1(h, 1e-3), hankel1_small_asym(h, 1e-3).value));
    }
    // Order zero: the logarithmic leading term carries the imaginary part only.
    const cplx h0 = hankel1(0.0, 1e-3);
    const double small0 = std::abs(h0.imag() - hankel1_small_asym(HankelOrder(0.0), 1e-3).value.imag()) /
                          std::abs(h0.imag());
    o.check(small <= 0.02, fmt("small argument nu = 1/2, 1, 3/2: %.2e <= 2e-2", small));
    o.check(small0 <= 0.02, fmt("small argument nu = 0 (imaginary part): %.2e <= 2e-2", small0));
    double large = 0;
    for (double nu : {0.0, 0.5, 1.0, 1.5})
        for (double th : {0.0, 0.5, 1.5, 2.5, pi}) {
            const cplx z = std::polar(100.0, th);
            large = std::max(large, rel(hankel1(nu, z), hankel1_large_asym(HankelOrder(nu), z)));
        }
    o.check(large <= 0.02, fmt("large argument |z| = 100: %.2e <= 2e-2", large));
    double deriv = 0;
    const double h = 1e-5;
    for (double nu : {0.0, 0.5, 1.0, 1.5, 2.0})
        for (cplx z : {cplx(2.0, 0.0), cplx(0.7, 0.4), cplx(5.0, 2.0), cplx(-3, 1), cplx(15.0, 0.5)}) {
            const cplx fd = (hankel1(nu, z + h) - hankel1(nu, z - h)) / (2 * h);
            deriv = std::max(deriv, rel(hankel1_deriv(nu, z), fd));
        }
    o.check(deriv <= 1e-6, fmt("derivative identity vs central differences: %.1e <= 1e-6", deriv));
}

void green_identities(Outcome& o) {
    double scalar = 0;
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
        scalar = std::max(scalar, std::abs(v - phi) / phi);
    }
    o.check(scalar <= 1e-2, fmt("weak -Laplacian identity n = 3: %.1e <= 1e-2", scalar));

    double spinor = 0;
    for (int n : {2, 3}) {
        const CliffordRep rep = build_clifford(n);
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
            const CMat v = integrate(
                rule,
                [&](const auto& x) {
                    const VectorXd grad = -2.0 * x * std::exp(-x.squaredNorm());
                    const CMat k = massless_threshold_kernel(rep, x - y).value;
                    CMat acc = CMat::Zero(rep.N, rep.N);
                    for (int j = 0; j < n; ++j) acc += (I * grad[j]) * (rep.alpha(j) * k);
                    return acc;
                },
                CMat(CMat::Zero(rep.N, rep.N)));
            spinor = std::max(spinor, rel(v, CMat(std::exp(-y.squaredNorm()) * rep.identity())));
        }
    }
    o.check(spinor <= 1e-2, fmt("weak Dirac identity n = 2, 3: %.1e <= 1e-2", spinor));

    std::mt19937 gen(11);
    std::uniform_real_distribution<double> u(-1, 1);
    double fact = 0;
    int samples = 0;
    for (int n : {2, 3}) {
        const CliffordRep rep = build_clifford(n);
        for (int s = 0; s < 5; ++s, ++samples) {
            VectorXd x(n), y(n);
            for (int j = 0; j < n; ++j) x[j] = u(gen), y[j] = u(gen);
            const cplx z(0.9 * u(gen), 0.2 + 0.5 * std::abs(u(gen)));
            fact = std::max(fact, rel(massive_dirac_green(rep, 1.0, z, x, y).value, factorized(rep, 1.0, z, x, y)));
        }
    }
    o.check(fact <= 1e-4, fmt("massive factorization, %.0f samples: %.1e <= 1e-4", samples, fact));
}

double gaussian(double r) { return std::pow(2 * pi, -1.5) * std::exp(-0.5 * r * r); }

void riesz_identities(Outcome& o) {
    const auto b1 = beta_integral(1, 1, 3), b2 = beta_integral(1, 2, 5);
    const double e1 = std::max(b1.rel_err(), std::abs(b1.closed_form / std::pow(pi, 3) - 1));
    const double e2 = std::max(b2.rel_err(), std::abs(b2.closed_form / (4 * pi * pi) - 1));
    o.check(e1 <= 1e-3, fmt("beta (1,1,3) -> pi^3: %.1e <= 1e-3", e1));
    o.check(e2 <= 1e-3, fmt("beta (1,2,5) -> 4 pi^2: %.1e <= 1e-3", e2));
    // Homogeneity: |x - w| doubled scales the composition by 2^{alpha + beta - n}.
    const VectorXd x = Eigen::Vector3d(0.2, 0.1, -0.3);
    const auto c1 = composition_check(1, 1, 3, x, VectorXd(x + Eigen::Vector3d(0, 1, 0)));
    const auto c2 = composition_check(1, 1, 3, x, VectorXd(x + Eigen::Vector3d(0, 2, 0)));
    const double hom = std::max({c1.rel_err(), c2.rel_err(), std::abs(2 * c2.quadrature / c1.quadrature - 1)});
    o.check(hom <= 1e-3, fmt("composition and homogeneity: %.1e <= 1e-3", hom));
    const auto f = make_radial_field(3, gaussian, 30.0);
    const auto g11 = riesz_apply(riesz_apply(f, 1.0), 1.0);
    const auto g2 = riesz_apply(f, 2.0);
    double semi = 0;
    for (double r : {0.0, 0.5, 1.0, 3.0, 10.0}) semi = std::max(semi, std::abs(g11(r) / g2(r) - 1));
    o.check(semi <= 0.02, fmt("semigroup R1 R1 = R2 on a Gaussian: %.1e <= 2e-2", semi));
}

void critical_schrodinger(Outcome& o) {
    const double exact = pi * pi / 4;
    const auto c2 = critical_coupling(well(Family::schrodinger, 3), radial(2000), 0.1, 5.0);
    const auto c4 = critical_coupling(well(Family::schrodinger, 3), radial(4000), 0.1, 5.0);
    if (c2.empty() || c4.empty()) return o.check(false, "no crossing found");
    o.check(std::abs(c2[0].lambda / exact - 1) <= 0.01,
            fmt("lambda_c %.6f vs pi^2/4 = %.6f (shooting %.6f)", c2[0].lambda, exact, oracle::frozen::schrodinger[0]));
    const double drift = std::abs(c4[0].lambda / c2[0].lambda - 1);
    o.check(drift < 2e-3, fmt("2000 -> 4000 nodes change %.1e < 2e-3", drift));
}

void dichotomy_schrodinger(Outcome& o) {
    const Analysis a3 = at_first_crossing(well(Family::schrodinger, 3), 5);
    if (const auto* s = crossing(o, a3, "n=3", oracle::frozen::schrodinger[0], 0.01)) {
        o.check(s->l2.norms[2] > s->l2.norms[0] * 1.05, fmt("n=3 L2(4R)/L2(R) %.3f grows", s->l2.norms[2] / s->l2.norms[0]));
        decay_and_kind(o, a3, "n=3", 1.0, 0.1, Classification::resonance);
    }
    const Analysis a4 = at_first_crossing(well(Family::schrodinger, 4), 8);
    if (const auto* s = crossing(o, a4, "n=4", oracle::frozen::schrodinger[1], 0.01)) {
        const double inc = s->l2.increment_ratio();
        o.check(s->l2.change_R_2R() > 0.01 && std::abs(inc - 1) <= 0.2,
                fmt("n=4 log-type growth, increment ratio %.3f", inc));
        decay_and_kind(o, a4, "n=4", 2.0, 0.2, Classification::resonance);
    }
    const Analysis a5 = at_first_crossing(well(Family::schrodinger, 5), 12);
    if (const auto* s = crossing(o, a5, "n=5", oracle::frozen::schrodinger[2], 0.01)) {
        const double ch = std::abs(s->l2.change_R_2R());
        o.check(ch < 0.05, fmt("n=5 L2 change R -> 2R %.1e < 5e-2", ch));
        decay_and_kind(o, a5, "n=5", 3.0, 0.3, Classification::eigenvalue);
    }
}

void dichotomy_massless(Outcome& o) {
    const Analysis a2 = at_first_crossing(well(Family::dirac_massless, 2), 4);
    if (const auto* s = crossing(o, a2, "n=2", oracle::frozen::massless_n2[0], 0.01)) {
        o.check(s->l2.norms[2] > s->l2.norms[0] * 1.05, fmt("n=2 L2(4R)/L2(R) %.3f grows", s->l2.norms[2] / s->l2.norms[0]));
        decay_and_kind(o, a2, "n=2", 1.0, 0.15, Classification::resonance);
    }
    const Analysis a3 = at_first_crossing(well(Family::dirac_massless, 3), 5);
    if (const auto* s = crossing(o, a3, "n=3", oracle::frozen::massless_n3[0], 0.01)) {
        const double ch = std::abs(s->l2.change_R_2R());
        o.check(ch < 0.05, fmt("n=3 L2 change R -> 2R %.1e < 5e-2", ch));
        decay_and_kind(o, a3, "n=3", 2.0, 0.2, Classification::eigenvalue);
    }
}

void massive_plus_m(Outcome& o) {
    PotentialSpec s = well(Family::dirac_massive, 3);
    s.m = 1.0;
    s.threshold = Threshold::plus_m;
    const Analysis a = at_first_crossing(s, 2);
    if (crossing(o, a, "+m", oracle::frozen::plus_m_kappa_minus[0], 0.01)) {
        for (const auto& st : a.report.states)
            o.check(std::abs(st.decay.gamma - 1.0) <= 0.15, st.channel + fmt(" gamma %.4f (1 +- 0.15)", st.decay.gamma));
        o.check(resonance_admissible(s.family, 3) && a.report.classification == Classification::resonance,
                std::string("classification ") + classification_name(a.report.classification) +
                    ", resonance admissible at n = 3");
    }
    const CliffordRep rep = build_clifford(3);
    double worst = 0;
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 20; ++k) {
        const VectorXd d = Eigen::Vector3d(u(gen), u(gen), u(gen));
        const double m = 0.25 + std::abs(u(gen));
        for (int sign : {1, -1}) {
            const CMat lhs = massive_threshold_kernel(rep, m, sign, d).value;
            // 1/(4 pi r) m (beta +- I) + i alpha . d / (4 pi r^3), written out directly.
            const double r = d.norm();
            CMat rhs = m * (rep.beta() + double(sign) * rep.identity()) / (4 * pi * r);
            for (int j = 0; j < 3; ++j) rhs += I * d[j] / (4 * pi * r * r * r) * rep.alpha(j);
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    }
    o.check(worst <= 1e-10, fmt("threshold kernel identity, entrywise %.1e <= 1e-10", worst));
}

void stein_weiss(Outcome& o) {
    const auto hom = SteinWeissVariant::homogeneous;
    const double a = stein_weiss_norm(3, 0, 1, 2, hom, 16).norm / stein_weiss_norm(3, 0, 1, 2, hom, 4).norm;
    const double b = stein_weiss_norm(3, 0, 2, 2, hom, 16).norm / stein_weiss_norm(3, 0, 2, 2, hom, 4).norm;
    o.check(a <= 1.1, fmt("(c,d) = (0,1) R=16/R=4 ratio %.4f <= 1.1", a));
    o.check(b >= 1.5, fmt("(c,d) = (0,2) R=16/R=4 ratio %.4f >= 1.5", b));
}

void weighted_kernel_probe(Outcome& o) {
    using Probes = std::vector<std::pair<VectorXd, VectorXd>>;
    Probes p3, p2;
    for (double a : {0.0, 1.0, 10.0}) {
        p3.push_back({Eigen::Vector3d(a, 0, 0), Eigen::Vector3d(a, 0, 0)});
        p2.push_back({Eigen::Vector2d(a, 0), Eigen::Vector2d(0.3, a + 1)});
    }
    p3.push_back({Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(4, 0, 0)});
    const auto r3 = weighted_kernel_bound(3, 1.25, 0, 4, 1, p3);
    const auto r2 = weighted_kernel_bound(2, 1.5, 0, 2, 1, p2);
    for (const auto* r : {&r3, &r2}) {
        const std::string tag = r == &r3 ? "(3, 5/4, 0, 4, 1)" : "(2, 3/2, 0, 2, 1)";
        o.check(std::isfinite(r->sup_ratio) && r->sup_ratio > 0, tag + fmt(" sup ratio %.4f", r->sup_ratio));
        o.check(r->drift() < 0.1, tag + fmt(" refinement drift %.1e < 0.1", r->drift()));
    }
}

}  // namespace

int main() {
    criterion(1, 1, clifford_suite);
    criterion(2, 1, special_functions);
    criterion(3, 30, green_identities);
    criterion(4, 60, riesz_identities);
    criterion(5, 10, critical_schrodinger);
    criterion(6, 120, dichotomy_schrodinger);
    criterion(7, 300, dichotomy_massless);
    criterion(8, 300, massive_plus_m);
    criterion(9, 60, stein_weiss);
    criterion(10, 60, weighted_kernel_probe);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures ? 1 : 0;
}
