#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thresholdscope/clifford.hpp"
#include "thresholdscope/greens.hpp"
#include "thresholdscope/potential.hpp"

namespace ts {

using CVec = Eigen::VectorXcd;

enum class GridKind { radial, full };
enum class Execution { parallel, serial };

struct GridSpec {
    GridKind kind = GridKind::radial;
    int radial_nodes = 2000;        // cells of the radial midpoint grid
    double full_grid_extent = 0.0;  // ball radius of the full grid; 0 selects the support radius
    double spacing = 0.0;           // full grid radial spacing; 0 selects extent / 12
    double memory_limit_mib = 2048;
};

// Spin-orbit channels +-(n - 1)/2 for Dirac families; a single s-wave channel (label 0) otherwise.
std::vector<double> lowest_channels(const PotentialSpec& spec);
std::string channel_label(Family f, GridKind kind, double kappa);

/// Birman-Schwinger operator V2 G V1^* discretized as W^{1/2} (V2 G V1^*) W^{1/2} on a node set,
/// where W holds the quadrature weights; eigenvalues are those of the Nystrom operator.
struct BSOperator {
    Family family = Family::schrodinger;
    int n = 3;
    double m = 0.0;
    Threshold threshold = Threshold::zero;
    GridKind kind = GridKind::radial;
    double kappa = 0.0;
    std::string channel;
    double coupling = 0.0;
    double extent = 0.0;    // radius covered by the nodes
    double support = 0.0;   // potential support radius
    int block = 1;          // components per node
    Eigen::MatrixXd nodes;  // dim x M; the radial grid stores |x| in a single row
    Eigen::VectorXd weights;
    Eigen::VectorXd cell_edges;  // radial grid only
    Eigen::VectorXd self_term;   // full grid: w_a G(x_a, x_a) for the even part after singularity subtraction
    std::vector<PointFactor> factors;
    std::optional<CliffordRep> rep;
    bool is_real = true;
    Eigen::MatrixXd real_matrix;
    CMat complex_matrix;
    bool hermitian = false;

    Eigen::Index size() const { return is_real ? real_matrix.rows() : complex_matrix.rows(); }
    Eigen::Index node_count() const { return nodes.cols(); }
    CMat matrix() const { return is_real ? CMat(real_matrix.cast<cplx>()) : complex_matrix; }
    CVec apply(const CVec& x) const;
};

// Full tensor grid (n = 2, 3): radial Gauss-Legendre times an angular product rule on a ball.
BSOperator assemble_bs(const PotentialSpec& spec, const GridSpec& grid, Execution exec = Execution::parallel);

// Exact channel reduction on a radial midpoint grid for spherically symmetric scalar potentials.
// Schrodinger: s-wave, n >= 3. Dirac: n = 2, 3, spin-orbit channel kappa.
BSOperator radial_reduce(const PotentialSpec& spec, int nodes, double kappa = 0.0,
                         Execution exec = Execution::parallel);

// Radial reduction for radial grids, full grid otherwise.
BSOperator assemble(const PotentialSpec& spec, const GridSpec& grid, double kappa = 0.0,
                    Execution exec = Execution::parallel);

struct EigenPair {
    cplx mu;
    CVec vec;  // unit vector in the weighted basis
    double residual = 0.0;
};

struct Spectrum {
    std::vector<EigenPair> pairs;  // sorted by |mu + 1|
    double sigma_min = 1.0;        // smallest singular value of I + K
    bool hermitian = false;
    std::string solver;
    int iterations = 0;
};

// Eigenpairs nearest -1 plus the singularity certificate sigma_min(I + K).
Spectrum bs_spectrum(const BSOperator& op, int count = 8);

struct CriticalCoupling {
    double lambda;
    std::string channel;
    double kappa = 0.0;
};

// Couplings in [lambda_min, lambda_max] at which I + K(lambda) is singular, by K(lambda) = lambda K(1).
// Real negative eigenvalues mu of K(1) (|Im mu| <= tolerance |mu|) give lambda_c = -1 / mu.
std::vector<CriticalCoupling> critical_coupling(const PotentialSpec& spec, const GridSpec& grid, double lambda_min,
                                                double lambda_max, double tolerance = 1e-8);

struct ShellSample {
    double r;
    double norm;  // |Psi(x)| at |x| = r (root mean square over the sphere for the full grid)
    CVec components;
};

struct ReconstructedState {
    CVec phi;                      // Birman-Schwinger vector at the nodes
    CVec psi_nodes;                // Psi at the nodes
    std::vector<ShellSample> psi_shells;
    std::vector<ShellSample> grad_shells;
    double residual = 0.0;         // |Phi - V2 Psi| / |Phi|
    double kernel_residual = 0.0;  // |(I + K) phi| / |phi|
    cplx mu;
};

// Log-spaced radii in [r1, r2].
std::vector<double> log_shells(double r1, double r2, int count);
// Default window [2a, 40a] with 16 shells for support radius a.
std::vector<double> default_shells(double support);

// Psi = -G V1^* phi evaluated at the shells; vec is a weighted-basis vector with |(I + K) vec| <= 1e-2 |vec|.
ReconstructedState reconstruct_state(const BSOperator& op, const EigenPair& pair, const std::vector<double>& shells,
                                     bool permissive = false);

// |grad Psi| on shells (Schrodinger only), from the differentiated reconstruction kernel.
std::vector<ShellSample> reconstruct_gradient(const BSOperator& op, const ReconstructedState& state,
                                              const std::vector<double>& shells);

struct DecayFit {
    double gamma = 0.0;
    double stderr_ = 0.0;
    int shells = 0;
    double r1 = 0.0, r2 = 0.0;
};

DecayFit decay_fit(const std::vector<ShellSample>& samples, double r1, double r2, double support = 0.0);
DecayFit decay_fit(const ReconstructedState& state, double r1, double r2, double support = 0.0);

struct L2Trend {
    double R = 0.0;
    double norms[3] = {0, 0, 0};  // truncated L2 norms squared at R, 2R, 4R
    double change_R_2R() const { return norms[1] / norms[0] - 1.0; }
    double change_2R_4R() const { return norms[2] / norms[1] - 1.0; }
    // Ratio of successive increments: about 2 for r^{-1} tails in R^3, 1 for log growth, 1/2 for r^{-3} in R^5.
    double increment_ratio() const { return (norms[2] - norms[1]) / (norms[1] - norms[0]); }
};

L2Trend l2_trend(const BSOperator& op, const ReconstructedState& state, double R);

enum class Classification { regular, resonance, eigenvalue };
const char* classification_name(Classification c);

struct Tolerances {
    double eps_sing = 1e-2;
    double l2_stable = 0.05;
    double gamma_tie = 0.05;  // |gamma - n/2| below max(gamma_tie, 3 stderr) counts as borderline
};

struct StateReport {
    std::string channel;
    cplx mu;
    double residual = 0.0;
    DecayFit decay;
    L2Trend l2;
    Classification kind = Classification::regular;
};

struct ThresholdReport {
    Family family = Family::schrodinger;
    int n = 3;
    Classification classification = Classification::regular;
    double sigma_min = 1.0;
    std::vector<cplx> bs_eigenvalues_near_minus_one;
    std::vector<CriticalCoupling> lambda_critical;
    std::vector<StateReport> states;
    bool mixture = false;
    bool dimension_table_consistent = true;
    std::vector<std::string> notes;
};

// Dimensions in which a threshold resonance can occur for the family.
bool resonance_admissible(Family f, int n);

// Classifies the threshold from sigma_min, the near-(-1) eigenvalues and one decay/L2 record per state.
ThresholdReport classify_threshold(Family family, int n, double sigma_min, const std::vector<cplx>& near_minus_one,
                                   std::vector<StateReport> states, const Tolerances& tol = {});

}  // namespace ts
