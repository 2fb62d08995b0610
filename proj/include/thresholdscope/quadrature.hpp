#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace ts {

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
    std::size_t size() const { return x.size(); }
};

// Gauss-Legendre nodes and weights on [-1, 1].
const Rule1D& gauss_legendre(int order);
// Composite Gauss-Legendre rule over consecutive panels [b_i, b_{i+1}].
Rule1D composite_rule(const std::vector<double>& breaks, int order);
// Breaks from a to b, splitting so that no panel is longer than max(h, ratio * left end).
std::vector<double> graded_breaks(double a, double b, double h, double ratio = 0.5);

// Smooth cutoff: 1 on [0, 1/2], 0 on [1, inf), C-infinity in between. Argument is rho / delta.
double smooth_cut(double s);

/// Point singularity of an integrand: behaves like |y - x|^sigma near x.
struct Center {
    Eigen::VectorXd x;
    double sigma = 0.0;
};

struct PolarRuleOptions {
    Eigen::VectorXd origin;  // polar origin of the far-field rule; may coincide with a center
    double decay = 0.0;      // integrand ~ |y|^{-decay} at infinity (needed when outer_radius is infinite)
    double outer_radius = std::numeric_limits<double>::infinity();
    double scale = 1.0;      // length scale of smooth factors (limits radial panel length)
    int level = 3;           // accuracy knob; nodes per panel grow linearly with it
    bool axisymmetric = false;  // integrand invariant under rotations fixing the line of centers
    double patch_fraction = 0.45;
};

/// Nodes (columns of points) and weights of a cubature rule on R^n.
struct NodeSet {
    int n = 0;
    Eigen::MatrixXd points;
    std::vector<double> weights;
    std::size_t size() const { return weights.size(); }
};

// Partition-of-unity rule: graded polar patches around each off-origin center, plus a polar rule
// about the origin for the remainder, with radial grading at the origin and an algebraic tail map.
NodeSet polar_rule(int n, const std::vector<Center>& centers, const PolarRuleOptions& opt);

// Deterministic blocked summation of w_i f(y_i), parallel over fixed blocks.
template <class T, class F>
T integrate(const NodeSet& rule, F&& f, const T& zero) {
    constexpr std::size_t kBlocks = 256;
    const std::size_t m = rule.size();
    std::vector<T> partial(kBlocks, zero);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t b = 0; b < kBlocks; ++b) {
        const std::size_t lo = m * b / kBlocks, hi = m * (b + 1) / kBlocks;
        T acc = zero;
        for (std::size_t i = lo; i < hi; ++i) acc += rule.weights[i] * f(rule.points.col(i));
        partial[b] = acc;
    }
    T sum = zero;
    for (const auto& p : partial) sum += p;
    return sum;
}

template <class T, class F>
T integrate_serial(const NodeSet& rule, F&& f, const T& zero) {
    T acc = zero;
    for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * f(rule.points.col(i));
    return acc;
}

}  // namespace ts
