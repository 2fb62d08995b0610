#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bs_kernel.hpp"
#include "thresholdscope/errors.hpp"
#include "thresholdscope/quadrature.hpp"

namespace ts {

using detail::Small;

namespace detail {

void RadialKernel::eval(double r, double t, bool same, double* g) const {
    if (family == Family::schrodinger) {
        g[0] = std::pow(std::max(r, t), 2.0 - n) / ((n - 2) * omega);
        return;
    }
    const double k = kappa;
    const double below = same ? 0.5 : (t < r ? 1.0 : 0.0);  // theta(r - t)
    const double above = same ? 0.5 : 1.0 - below;          // theta(t - r)
    // P = (d/dr + kappa/r)^{-1}, Q = (d/dr - kappa/r)^{-1}, each with the L2 boundary condition.
    const double P = k > 0 ? below * std::pow(t / r, k) : -above * std::pow(t / r, k);
    const double Q = k < 0 ? below * std::pow(r / t, k) : -above * std::pow(r / t, k);
    g[0] = 0.0;
    g[1] = P;
    g[2] = -Q;
    g[3] = 0.0;
    const double lo = std::min(r, t), hi = std::max(r, t);
    if (threshold == Threshold::plus_m) {
        // -2m P Q
        const double W = k > 0 ? std::pow(lo, 2 * k + 1) / (2 * k + 1) : std::pow(hi, 2 * k + 1) / (-2 * k - 1);
        g[0] = 2 * m * std::pow(r * t, -k) * W;
    } else if (threshold == Threshold::minus_m) {
        // 2m Q P
        const double W = k < 0 ? std::pow(lo, 1 - 2 * k) / (1 - 2 * k) : std::pow(hi, 1 - 2 * k) / (2 * k - 1);
        g[3] = -2 * m * std::pow(r * t, k) * W;
    }
}

double RadialKernel::radial_derivative(double r, double t, bool same) const {
    const double below = same ? 0.5 : (t < r ? 1.0 : 0.0);
    return -below * std::pow(r, 1.0 - n) / omega;
}

RadialKernel radial_kernel(const BSOperator& op) {
    return {op.family, op.n, op.m, op.threshold, op.kappa, sphere_area(op.n)};
}

void FullKernel::eval(const double* d, Small& out) const {
    double r2 = 0;
    for (int j = 0; j < n; ++j) r2 += d[j] * d[j];
    const double r = std::sqrt(r2);
    out.setZero(N, N);
    if (has_even) out = (std::pow(r, 2.0 - n) / ((n - 2) * sphere_area(n))) * even;
    if (has_odd) {
        const cplx s(0.0, coef * std::pow(r, -n));
        for (int j = 0; j < n; ++j) out += (s * d[j]) * alpha[j];
    }
}

double FullKernel::ball_integral(double r, double R) const {
    return (r * r / n + 0.5 * (R * R - r * r)) / (n - 2);
}

FullKernel full_kernel(const BSOperator& op) {
    FullKernel k;
    k.n = op.n;
    if (op.family == Family::schrodinger) {
        k.has_even = true;
        k.even = Small::Identity(1, 1);
        return k;
    }
    const CliffordRep& rep = *op.rep;
    k.N = rep.N;
    k.has_odd = true;
    k.coef = massless_threshold_coefficient(op.n);
    for (int j = 0; j < op.n; ++j) k.alpha.push_back(rep.alpha(j));
    if (op.family == Family::dirac_massive) {
        k.has_even = true;
        const double sign = op.threshold == Threshold::plus_m ? 1.0 : -1.0;
        k.even = op.m * (rep.beta() + sign * rep.identity());
    }
    return k;
}

}  // namespace detail

namespace {

void check_memory(Eigen::Index dim, bool real, double limit_mib) {
    const double mib = double(dim) * double(dim) * (real ? 8.0 : 16.0) / (1024.0 * 1024.0);
    if (mib > limit_mib) {
        std::ostringstream os;
        os << "grid too large: dense operator of dimension " << dim << " needs " << mib << " MiB (limit "
           << limit_mib << " MiB)";
        throw ValidationError(os.str());
    }
}

// Profile breaks below limit, dropping any closer than min_gap to the previous one or to limit.
std::vector<double> merged_breaks(const PotentialSpec& spec, double limit, double min_gap) {
    std::vector<double> out;
    double last = 0.0;
    for (double b : profile_breaks(spec))
        if (b - last >= min_gap && limit - b >= min_gap) {
            out.push_back(b);
            last = b;
        }
    out.push_back(limit);
    return out;
}

// Cell edges on [0, a]: cells distributed over the profile's smooth segments in proportion to length.
std::vector<double> radial_edges(const PotentialSpec& spec, double a, int cells) {
    std::vector<double> breaks = merged_breaks(spec, a, 0.5 * a / cells);
    if (int(breaks.size()) > cells / 4) breaks = {a};
    std::vector<double> edges{0.0};
    double left = 0.0;
    int used = 0;
    for (std::size_t s = 0; s < breaks.size(); ++s) {
        const double len = breaks[s] - left;
        int c = s + 1 == breaks.size() ? cells - used : std::max(1, int(std::lround(cells * len / a)));
        c = std::max(1, std::min(c, cells - used - int(breaks.size() - s - 1)));
        for (int i = 1; i <= c; ++i) edges.push_back(left + len * i / c);
        used += c;
        left = breaks[s];
    }
    return edges;
}

void fill_common(BSOperator& op, const PotentialSpec& spec) {
    op.family = spec.family;
    op.n = spec.n;
    op.m = spec.m;
    op.threshold = spec.threshold;
    op.coupling = spec.coupling;
    op.support = support_radius(spec);
}

template <class Row>
void for_rows(Eigen::Index rows, Execution exec, Row&& row) {
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index a = 0; a < rows; ++a) row(a);
    } else {
        for (Eigen::Index a = 0; a < rows; ++a) row(a);
    }
}

template <class M>
bool is_hermitian(const M& K) {
    const double scale = K.cwiseAbs().maxCoeff();
    return (K - K.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1e-300);
}

}  // namespace

std::vector<double> lowest_channels(const PotentialSpec& spec) {
    if (spec.family == Family::schrodinger) return {0.0};
    const double k = 0.5 * (spec.n - 1);
    return {-k, k};
}

std::string channel_label(Family f, GridKind kind, double kappa) {
    if (kind == GridKind::full) return "full";
    if (f == Family::schrodinger) return "s";
    std::ostringstream os;
    os << "kappa=" << (kappa > 0 ? "+" : "") << kappa;
    return os.str();
}

BSOperator radial_reduce(const PotentialSpec& spec, int nodes, double kappa, Execution exec) {
    validate(spec);
    if (!is_radial_scalar(spec)) throw ValidationError("radial reduction needs a spherically symmetric scalar potential");
    if (nodes < 8) throw ValidationError("radial grid needs at least 8 nodes");
    BSOperator op;
    fill_common(op, spec);
    op.kind = GridKind::radial;
    if (spec.family == Family::schrodinger) {
        if (kappa != 0.0) throw ValidationError("schrodinger radial reduction supports the s-wave channel only");
    } else {
        if (spec.n != 2 && spec.n != 3) throw ValidationError("dirac radial channels are implemented for n = 2, 3");
        const double k0 = 0.5 * (spec.n - 1), steps = std::abs(kappa) - k0;
        if (!(steps >= -1e-12) || std::abs(steps - std::round(steps)) > 1e-12)
            throw ValidationError("kappa must be +-(n-1)/2 + integer");
        if (spec.threshold == Threshold::plus_m && kappa < 0 && kappa >= -0.5)
            throw ValidationError("threshold +m kernel diverges in channel kappa = -1/2 (n = 2)");
        if (spec.threshold == Threshold::minus_m && kappa > 0 && kappa <= 0.5)
            throw ValidationError("threshold -m kernel diverges in channel kappa = +1/2 (n = 2)");
    }
    op.kappa = kappa;
    op.channel = channel_label(spec.family, GridKind::radial, kappa);
    op.block = spec.family == Family::schrodinger ? 1 : 2;
    op.extent = op.support > 0 ? op.support : 1.0;
    const auto edges = radial_edges(spec, op.extent, nodes);
    const Eigen::Index M = Eigen::Index(edges.size()) - 1;
    op.cell_edges = Eigen::Map<const Eigen::VectorXd>(edges.data(), edges.size());
    op.nodes.resize(1, M);
    op.weights.resize(M);
    const double omega = sphere_area(spec.n);
    for (Eigen::Index b = 0; b < M; ++b) {
        const double lo = edges[b], hi = edges[b + 1];
        op.nodes(0, b) = 0.5 * (lo + hi);
        op.weights[b] = spec.family == Family::schrodinger
                            ? omega * (std::pow(hi, spec.n) - std::pow(lo, spec.n)) / spec.n
                            : hi - lo;
    }
    op.factors.reserve(M);
    Eigen::VectorXd v1(M), v2(M);
    for (Eigen::Index b = 0; b < M; ++b) {
        op.factors.push_back(factorize_scalar(scalar_profile(spec, op.nodes(0, b))));
        v1[b] = op.factors[b].V1(0, 0).real() * std::sqrt(op.weights[b]);
        v2[b] = op.factors[b].V2(0, 0).real() * std::sqrt(op.weights[b]);
    }
    const Eigen::Index dim = M * op.block;
    check_memory(dim, true, 4096);
    op.is_real = true;
    op.real_matrix.setZero(dim, dim);
    const auto kern = detail::radial_kernel(op);
    const int B = op.block;
    for_rows(M, exec, [&](Eigen::Index a) {
        if (v2[a] == 0.0) return;
        double g[4];
        const double r = op.nodes(0, a);
        for (Eigen::Index b = 0; b < M; ++b) {
            if (v1[b] == 0.0) continue;
            kern.eval(r, op.nodes(0, b), a == b, g);
            const double s = v2[a] * v1[b];
            for (int i = 0; i < B; ++i)
                for (int j = 0; j < B; ++j) op.real_matrix(i * M + a, j * M + b) = s * g[i * B + j];
        }
    });
    op.hermitian = is_hermitian(op.real_matrix);
    return op;
}

BSOperator assemble_bs(const PotentialSpec& spec, const GridSpec& grid, Execution exec) {
    validate(spec);
    if (spec.n != 2 && spec.n != 3) throw ValidationError("full tensor grids are implemented for n = 2, 3");
    if (spec.family == Family::schrodinger && spec.n != 3)
        throw ValidationError("schrodinger threshold kernel needs n >= 3; full grid supports n = 3");
    if (spec.family == Family::dirac_massive && spec.n != 3)
        throw ValidationError("massive threshold kernel diverges for n = 2");
    BSOperator op;
    fill_common(op, spec);
    op.kind = GridKind::full;
    op.channel = channel_label(spec.family, GridKind::full, 0.0);
    if (spec.family != Family::schrodinger) op.rep = build_clifford(spec.n);
    op.block = op.rep ? op.rep->N : 1;
    const double R = grid.full_grid_extent > 0 ? grid.full_grid_extent : (op.support > 0 ? op.support : 1.0);
    const double h = grid.spacing > 0 ? grid.spacing : R / 12.0;
    op.extent = R;
    const int nr = std::max(2, int(std::ceil(R / h - 1e-9)));

    // Radial Gauss-Legendre, one panel per smooth segment of the profile.
    const std::vector<double> breaks = merged_breaks(spec, R, 0.5 * h);
    std::vector<double> rr, rw;
    double left = 0.0;
    for (double b : breaks) {
        const int q = std::max(2, int(std::lround(nr * (b - left) / R)));
        const auto& g = gauss_legendre(q);
        for (std::size_t i = 0; i < g.size(); ++i) {
            rr.push_back(left + 0.5 * (b - left) * (g.x[i] + 1));
            rw.push_back(0.5 * (b - left) * g.w[i]);
        }
        left = b;
    }
    std::vector<Eigen::VectorXd> dirs;
    std::vector<double> dw;
    const double pi = std::numbers::pi;
    if (spec.n == 2) {
        const int nt = 4 * nr;
        for (int i = 0; i < nt; ++i) {
            const double th = 2 * pi * (i + 0.5) / nt;
            dirs.push_back(Eigen::Vector2d(std::cos(th), std::sin(th)));
            dw.push_back(2 * pi / nt);
        }
    } else {
        const auto& g = gauss_legendre(nr);
        const int na = 2 * nr;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (int j = 0; j < na; ++j) {
                const double c = g.x[i], s = std::sqrt(1 - c * c), ph = 2 * pi * (j + 0.5) / na;
                dirs.push_back(Eigen::Vector3d(s * std::cos(ph), s * std::sin(ph), c));
                dw.push_back(g.w[i] * 2 * pi / na);
            }
    }
    const Eigen::Index M = Eigen::Index(rr.size() * dirs.size());
    const Eigen::Index dim = M * op.block;
    check_memory(dim, op.block == 1, grid.memory_limit_mib);
    op.nodes.resize(spec.n, M);
    op.weights.resize(M);
    Eigen::Index idx = 0;
    for (std::size_t i = 0; i < rr.size(); ++i)
        for (std::size_t j = 0; j < dirs.size(); ++j, ++idx) {
            op.nodes.col(idx) = rr[i] * dirs[j];
            op.weights[idx] = rw[i] * std::pow(rr[i], spec.n - 1) * dw[j];
        }
    const Factorization fac = factorize(spec, op.rep ? &*op.rep : nullptr, op.nodes);
    op.factors = fac.factors;

    const auto kern = detail::full_kernel(op);
    const int B = op.block;
    op.self_term = Eigen::VectorXd::Zero(M);
    std::vector<Small> left_f(M), right_f(M);  // sqrt(w) V2 and V1^* sqrt(w)
    std::vector<char> active(M);
    for (Eigen::Index b = 0; b < M; ++b) {
        const double sw = std::sqrt(op.weights[b]);
        left_f[b] = sw * op.factors[b].V2;
        right_f[b] = sw * op.factors[b].V1.adjoint();
        active[b] = op.factors[b].V1.cwiseAbs().maxCoeff() > 0.0;
    }
    op.is_real = B == 1;
    if (op.is_real) op.real_matrix.setZero(dim, dim);
    else op.complex_matrix.setZero(dim, dim);
    for_rows(M, exec, [&](Eigen::Index a) {
        Small g(B, B);
        double d[3];
        double offsum = 0.0;
        for (Eigen::Index b = 0; b < M; ++b) {
            if (b == a) continue;
            for (int j = 0; j < spec.n; ++j) d[j] = op.nodes(j, a) - op.nodes(j, b);
            if (kern.has_even) {
                double r2 = 0;
                for (int j = 0; j < spec.n; ++j) r2 += d[j] * d[j];
                offsum += op.weights[b] * std::pow(std::sqrt(r2), 2.0 - spec.n) / ((spec.n - 2) * sphere_area(spec.n));
            }
            if (!active[a] || !active[b]) continue;
            kern.eval(d, g);
            const Small blk = left_f[a] * g * right_f[b];
            for (int i = 0; i < B; ++i)
                for (int j = 0; j < B; ++j) {
                    if (op.is_real) op.real_matrix(i * M + a, j * M + b) = blk(i, j).real();
                    else op.complex_matrix(i * M + a, j * M + b) = blk(i, j);
                }
        }
        // Singularity subtraction for the even part; the odd part vanishes by symmetry.
        if (kern.has_even) {
            op.self_term[a] = kern.ball_integral(op.nodes.col(a).norm(), R) - offsum;
            if (active[a]) {
                const Small blk = op.factors[a].V2 * (op.self_term[a] * kern.even) * op.factors[a].V1.adjoint();
                for (int i = 0; i < B; ++i)
                    for (int j = 0; j < B; ++j) {
                        if (op.is_real) op.real_matrix(i * M + a, j * M + a) = blk(i, j).real();
                        else op.complex_matrix(i * M + a, j * M + a) = blk(i, j);
                    }
            }
        }
    });
    op.hermitian = op.is_real ? is_hermitian(op.real_matrix) : is_hermitian(op.complex_matrix);
    return op;
}

BSOperator assemble(const PotentialSpec& spec, const GridSpec& grid, double kappa, Execution exec) {
    if (grid.kind == GridKind::full) return assemble_bs(spec, grid, exec);
    return radial_reduce(spec, grid.radial_nodes, kappa, exec);
}

CVec BSOperator::apply(const CVec& x) const {
    if (is_real) {
        const Eigen::VectorXd re = real_matrix * x.real(), im = real_matrix * x.imag();
        CVec y(re.size());
        y.real() = re;
        y.imag() = im;
        return y;
    }
    return complex_matrix * x;
}

}  // namespace ts
