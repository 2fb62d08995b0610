#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bs_kernel.hpp"
#include "thresholdscope/errors.hpp"
#include "thresholdscope/quadrature.hpp"

namespace ts {

using detail::Small;

namespace {

struct Direction {
    Eigen::VectorXd e;
    double w;  // normalized to sum 1
};

std::vector<Direction> shell_directions(int n) {
    std::vector<Direction> d;
    const double pi = std::numbers::pi;
    if (n == 2) {
        for (int i = 0; i < 16; ++i) {
            const double t = 2 * pi * i / 16;
            d.push_back({Eigen::Vector2d(std::cos(t), std::sin(t)), 1.0 / 16});
        }
    } else {
        const auto& g = gauss_legendre(4);
        for (std::size_t i = 0; i < g.size(); ++i)
            for (int j = 0; j < 8; ++j) {
                const double c = g.x[i], s = std::sqrt(1 - c * c), p = 2 * pi * j / 8;
                d.push_back({Eigen::Vector3d(s * std::cos(p), s * std::sin(p), c), g.w[i] / 16});
            }
    }
    // First direction is the +x axis, used for component output.
    std::rotate(d.begin(), std::find_if(d.begin(), d.end(), [](const Direction& x) { return x.e[0] > 0.99; }), d.end());
    if (d.front().e[0] < 0.99) d.insert(d.begin(), {Eigen::VectorXd::Unit(n, 0), 0.0});
    return d;
}

/// Psi = -sum_b G(x, x_b) u_b with u_b = w_b V1_b^* phi_b, for one eigenvector.
class Evaluator {
public:
    Evaluator(const BSOperator& op, const CVec& y) : op_(op), M_(op.node_count()), B_(op.block) {
        u_.resize(M_ * B_);
        for (Eigen::Index b = 0; b < M_; ++b) {
            const double sw = std::sqrt(op.weights[b]);
            if (op.kind == GridKind::radial) {
                const double v1 = op.factors[b].V1(0, 0).real();
                for (int i = 0; i < B_; ++i) u_[i * M_ + b] = sw * v1 * y[i * M_ + b];
            } else {
                CVec yb(B_);
                for (int i = 0; i < B_; ++i) yb[i] = y[i * M_ + b];
                const CVec ub = sw * (op.factors[b].V1.adjoint() * yb);
                for (int i = 0; i < B_; ++i) u_[i * M_ + b] = ub[i];
            }
        }
        if (op.kind == GridKind::radial) rk_ = detail::radial_kernel(op);
        else fk_ = detail::full_kernel(op);
    }

    // Psi at node a, with the assembly's diagonal convention.
    CVec at_node(Eigen::Index a) const {
        if (op_.kind == GridKind::radial) return radial(op_.nodes(0, a), a, false);
        return full(op_.nodes.col(a), a, false);
    }
    CVec at_radius(double r) const { return radial(r, -1, false); }
    CVec at_point(const Eigen::VectorXd& x) const { return full(x, -1, false); }
    // Radial derivative (radial grid) or gradient (full grid); Schrodinger only.
    double radial_gradient(double r) const { return radial(r, -1, true)[0].real(); }
    CVec gradient(const Eigen::VectorXd& x) const { return full(x, -1, true); }

private:
    CVec radial(double r, Eigen::Index self, bool deriv) const {
        CVec psi = CVec::Zero(B_);
        double g[4];
        for (Eigen::Index b = 0; b < M_; ++b) {
            const double t = op_.nodes(0, b);
            if (deriv) {
                psi[0] -= rk_.radial_derivative(r, t, b == self) * u_[b];
                continue;
            }
            rk_.eval(r, t, b == self, g);
            for (int i = 0; i < B_; ++i)
                for (int j = 0; j < B_; ++j) psi[i] -= g[i * B_ + j] * u_[j * M_ + b];
        }
        return psi;
    }

    CVec full(const Eigen::VectorXd& x, Eigen::Index self, bool deriv) const {
        const int n = op_.n;
        CVec out = CVec::Zero(deriv ? n : B_);
        Small g(B_, B_);
        double d[3];
        const double omega = sphere_area(n);
        for (Eigen::Index b = 0; b < M_; ++b) {
            CVec ub(B_);
            for (int i = 0; i < B_; ++i) ub[i] = u_[i * M_ + b];
            if (b == self) {
                if (fk_.has_even) out -= (op_.self_term[b] / op_.weights[b]) * (fk_.even * ub);
                continue;
            }
            double r2 = 0;
            for (int j = 0; j < n; ++j) {
                d[j] = x[j] - op_.nodes(j, b);
                r2 += d[j] * d[j];
            }
            if (deriv) {
                const double s = -std::pow(r2, -0.5 * n) / omega;
                for (int j = 0; j < n; ++j) out[j] -= s * d[j] * ub[0];
                continue;
            }
            fk_.eval(d, g);
            out -= g * ub;
        }
        return out;
    }

    const BSOperator& op_;
    Eigen::Index M_;
    int B_;
    CVec u_;
    detail::RadialKernel rk_{};
    detail::FullKernel fk_{};
};

// |Psi|^2 integrated over the sphere of radius r.
double shell_density(const BSOperator& op, const Evaluator& ev, double r, const std::vector<Direction>& dirs) {
    if (op.kind == GridKind::radial) {
        const CVec psi = ev.at_radius(r);
        if (op.family == Family::schrodinger) return sphere_area(op.n) * std::pow(r, op.n - 1) * std::norm(psi[0]);
        return psi.squaredNorm();
    }
    double acc = 0;
    for (const auto& d : dirs) acc += d.w * ev.at_point(r * d.e).squaredNorm();
    return sphere_area(op.n) * std::pow(r, op.n - 1) * acc;
}

ShellSample shell_sample(const BSOperator& op, const Evaluator& ev, double r, const std::vector<Direction>& dirs) {
    ShellSample s;
    s.r = r;
    if (op.kind == GridKind::radial) {
        s.components = ev.at_radius(r);
        s.norm = op.family == Family::schrodinger
                     ? std::abs(s.components[0])
                     : std::pow(r, -0.5 * (op.n - 1)) * s.components.norm() / std::sqrt(sphere_area(op.n));
        return s;
    }
    double acc = 0;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const CVec psi = ev.at_point(r * dirs[i].e);
        if (i == 0) s.components = psi;
        acc += dirs[i].w * psi.squaredNorm();
    }
    s.norm = std::sqrt(acc);
    return s;
}

}  // namespace

std::vector<double> log_shells(double r1, double r2, int count) {
    if (!(r1 > 0) || !(r2 > r1) || count < 2) throw ValidationError("shells need 0 < r1 < r2 and count >= 2");
    std::vector<double> s(count);
    for (int i = 0; i < count; ++i) s[i] = r1 * std::pow(r2 / r1, double(i) / (count - 1));
    return s;
}

std::vector<double> default_shells(double support) {
    const double a = support > 0 ? support : 1.0;
    return log_shells(2 * a, 40 * a, 16);
}

ReconstructedState reconstruct_state(const BSOperator& op, const EigenPair& pair, const std::vector<double>& shells,
                                     bool permissive) {
    if (pair.vec.size() != op.size()) throw ValidationError("vector size does not match the operator");
    ReconstructedState st;
    st.mu = pair.mu;
    const double vn = pair.vec.norm();
    const Eigen::Index M = op.node_count();
    const int B = op.block;
    if (vn == 0.0) {
        if (!permissive) throw ValidationError("phi = 0 is not a Birman-Schwinger state");
        st.phi = CVec::Zero(op.size());
        st.psi_nodes = CVec::Zero(op.size());
        for (double r : shells) st.psi_shells.push_back({r, 0.0, CVec::Zero(B)});
        return st;
    }
    st.kernel_residual = (pair.vec + op.apply(pair.vec)).norm() / vn;
    if (st.kernel_residual > 1e-2 && !permissive)
        throw ValidationError("phi is not approximately in the kernel of I + K");
    st.phi.resize(op.size());
    for (Eigen::Index b = 0; b < M; ++b)
        for (int i = 0; i < B; ++i) st.phi[i * M + b] = pair.vec[i * M + b] / std::sqrt(op.weights[b]);

    const Evaluator ev(op, pair.vec);
    st.psi_nodes.resize(op.size());
#pragma omp parallel for schedule(static)
    for (Eigen::Index a = 0; a < M; ++a) {
        const CVec psi = ev.at_node(a);
        for (int i = 0; i < B; ++i) st.psi_nodes[i * M + a] = psi[i];
    }
    double num = 0, den = 0;
    for (Eigen::Index a = 0; a < M; ++a) {
        CVec phi(B), psi(B);
        for (int i = 0; i < B; ++i) {
            phi[i] = st.phi[i * M + a];
            psi[i] = st.psi_nodes[i * M + a];
        }
        const CVec v2psi = op.kind == GridKind::radial ? CVec(op.factors[a].V2(0, 0) * psi) : CVec(op.factors[a].V2 * psi);
        num += op.weights[a] * (phi - v2psi).squaredNorm();
        den += op.weights[a] * phi.squaredNorm();
    }
    st.residual = std::sqrt(num / den);

    const auto dirs = op.kind == GridKind::full ? shell_directions(op.n) : std::vector<Direction>{};
    st.psi_shells.resize(shells.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < shells.size(); ++i) st.psi_shells[i] = shell_sample(op, ev, shells[i], dirs);
    return st;
}

std::vector<ShellSample> reconstruct_gradient(const BSOperator& op, const ReconstructedState& state,
                                              const std::vector<double>& shells) {
    if (op.family != Family::schrodinger) throw ValidationError("gradient reconstruction is defined for schrodinger");
    const Eigen::Index M = op.node_count();
    CVec y(op.size());
    for (Eigen::Index b = 0; b < M; ++b) y[b] = state.phi[b] * std::sqrt(op.weights[b]);
    const Evaluator ev(op, y);
    const auto dirs = op.kind == GridKind::full ? shell_directions(op.n) : std::vector<Direction>{};
    std::vector<ShellSample> out;
    for (double r : shells) {
        ShellSample s;
        s.r = r;
        if (op.kind == GridKind::radial) {
            const double g = ev.radial_gradient(r);
            s.components = CVec::Constant(1, g);
            s.norm = std::abs(g);
        } else {
            double acc = 0;
            for (std::size_t i = 0; i < dirs.size(); ++i) {
                const CVec g = ev.gradient(r * dirs[i].e);
                if (i == 0) s.components = g;
                acc += dirs[i].w * g.squaredNorm();
            }
            s.norm = std::sqrt(acc);
        }
        out.push_back(std::move(s));
    }
    return out;
}

DecayFit decay_fit(const std::vector<ShellSample>& samples, double r1, double r2, double support) {
    if (!(r2 > r1)) throw ValidationError("decay window needs r1 < r2");
    if (r1 <= support) throw ValidationError("decay window lies inside the potential support");
    std::vector<double> x, y;
    for (const auto& s : samples)
        if (s.r >= r1 * (1 - 1e-12) && s.r <= r2 * (1 + 1e-12)) {
            if (!(s.norm > 0)) throw ValidationError("decay fit needs nonzero samples");
            x.push_back(std::log(s.r));
            y.push_back(std::log(s.norm));
        }
    const int k = int(x.size());
    if (k < 8) throw ValidationError("decay fit needs at least 8 shells in the window");
    double mx = 0, my = 0;
    for (int i = 0; i < k; ++i) mx += x[i] / k, my += y[i] / k;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < k; ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    const double slope = sxy / sxx;
    double sse = 0;
    for (int i = 0; i < k; ++i) {
        const double e = y[i] - my - slope * (x[i] - mx);
        sse += e * e;
    }
    return {-slope, std::sqrt(sse / (k - 2) / sxx), k, r1, r2};
}

DecayFit decay_fit(const ReconstructedState& state, double r1, double r2, double support) {
    return decay_fit(state.psi_shells, r1, r2, support);
}

L2Trend l2_trend(const BSOperator& op, const ReconstructedState& state, double R) {
    if (!(R > op.extent)) throw ValidationError("truncation radius must exceed the grid extent");
    const Eigen::Index M = op.node_count();
    const int B = op.block;
    double inner = 0;
    for (Eigen::Index a = 0; a < M; ++a) {
        double s = 0;
        for (int i = 0; i < B; ++i) s += std::norm(state.psi_nodes[i * M + a]);
        inner += op.weights[a] * s;
    }
    CVec y(op.size());
    for (Eigen::Index b = 0; b < M; ++b)
        for (int i = 0; i < B; ++i) y[i * M + b] = state.phi[i * M + b] * std::sqrt(op.weights[b]);
    const Evaluator ev(op, y);
    const auto dirs = op.kind == GridKind::full ? shell_directions(op.n) : std::vector<Direction>{};
    L2Trend t;
    t.R = R;
    double acc = inner, left = op.extent;
    const auto& g = gauss_legendre(8);
    for (int k = 0; k < 3; ++k) {
        const double right = R * (1 << k);
        // Geometric panels, ratio 2^{1/4}.
        const int panels = std::max(1, int(std::ceil(4 * std::log2(right / left))));
        const double q = std::pow(right / left, 1.0 / panels);
        std::vector<double> rs, ws;
        double lo = left;
        for (int p = 0; p < panels; ++p) {
            const double hi = lo * q;
            for (std::size_t i = 0; i < g.size(); ++i) {
                rs.push_back(lo + 0.5 * (hi - lo) * (g.x[i] + 1));
                ws.push_back(0.5 * (hi - lo) * g.w[i]);
            }
            lo = hi;
        }
        std::vector<double> dens(rs.size());
#pragma omp parallel for schedule(dynamic)
        for (std::size_t i = 0; i < rs.size(); ++i) dens[i] = shell_density(op, ev, rs[i], dirs);
        for (std::size_t i = 0; i < rs.size(); ++i) acc += ws[i] * dens[i];
        t.norms[k] = acc;
        left = right;
    }
    return t;
}

const char* classification_name(Classification c) {
    switch (c) {
        case Classification::regular: return "regular";
        case Classification::resonance: return "resonance";
        case Classification::eigenvalue: return "eigenvalue";
    }
    return "?";
}

bool resonance_admissible(Family f, int n) {
    switch (f) {
        case Family::schrodinger: return n == 3 || n == 4;
        case Family::dirac_massless: return n == 2;
        case Family::dirac_massive: return n == 3 || n == 4;
    }
    return false;
}

ThresholdReport classify_threshold(Family family, int n, double sigma_min, const std::vector<cplx>& near_minus_one,
                                   std::vector<StateReport> states, const Tolerances& tol) {
    ThresholdReport rep;
    rep.family = family;
    rep.n = n;
    rep.sigma_min = sigma_min;
    rep.bs_eigenvalues_near_minus_one = near_minus_one;
    const bool singular = sigma_min <= tol.eps_sing;
    if (!singular) {
        if (!states.empty()) throw ValidationError("threshold states supplied but I + K is not near-singular");
        rep.classification = Classification::regular;
        return rep;
    }
    if (states.empty()) throw ValidationError("I + K is near-singular but no reconstructed state was supplied");
    const double half = 0.5 * n;
    bool any_res = false, any_eig = false;
    for (auto& s : states) {
        const double growth = s.l2.change_R_2R();
        const double tie = std::max(tol.gamma_tie, 3 * s.decay.stderr_);
        if (std::abs(s.decay.gamma - half) <= tie) {
            s.kind = growth > tol.l2_stable ? Classification::resonance : Classification::eigenvalue;
        } else if (s.decay.gamma > half) {
            s.kind = growth < tol.l2_stable ? Classification::eigenvalue : Classification::resonance;
            if (s.kind == Classification::resonance) {
                std::ostringstream os;
                os << s.channel << ": decay exponent " << s.decay.gamma << " exceeds n/2 but the truncated norm grows by "
                   << growth << "; classified by norm growth";
                rep.notes.push_back(os.str());
            }
        } else {
            s.kind = Classification::resonance;
        }
        any_res |= s.kind == Classification::resonance;
        any_eig |= s.kind == Classification::eigenvalue;
    }
    rep.states = std::move(states);
    rep.mixture = any_res && any_eig;
    rep.classification = any_res ? Classification::resonance : Classification::eigenvalue;
    rep.dimension_table_consistent = !any_res || resonance_admissible(family, n);
    if (rep.mixture) rep.notes.push_back("degenerate crossing with both resonance and eigenvalue states");
    if (!rep.dimension_table_consistent) rep.notes.push_back("resonance found in a dimension where none is admissible");
    return rep;
}

}  // namespace ts
