#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thresholdscope/bs.hpp"

namespace ts {

struct Sweep {
    double lambda_min = 0.0;
    double lambda_max = 20.0;
    double tolerance = 1e-8;
};

struct AnalysisOptions {
    std::optional<Sweep> sweep;   // analyze at the first critical coupling; spec.coupling otherwise
    std::vector<double> shells;   // empty selects default_shells(support)
    double l2_radius = 0.0;       // 0 selects 10 x grid extent
    Tolerances tol;
    int eigenpairs = 8;
    bool refinement_check = true;  // repeat at half the resolution and report drifts
};

struct ChannelResult {
    std::string channel;
    double kappa = 0.0;
    double sigma_min = 1.0;
    std::string solver;
    std::vector<cplx> near_minus_one;
    std::vector<ReconstructedState> states;
};

struct Refinement {
    GridSpec coarse;
    double mu_drift = 0.0;     // max relative change of the eigenvalues nearest -1
    double gamma_drift = 0.0;  // max relative change of the decay exponents
    bool stable = true;        // both drifts below 1%
};

struct Analysis {
    PotentialSpec spec;
    GridSpec grid;
    AnalysisOptions options;
    double coupling = 0.0;
    std::vector<double> shells;
    double support = 0.0;
    double extent = 0.0;
    std::vector<ChannelResult> channels;
    ThresholdReport report;
    std::optional<Refinement> refinement;
    std::vector<std::string> warnings;
};

// Sweep (optional), spectrum per channel, reconstruction of every state within eps_sing of -1,
// decay and truncated-norm trend, classification, and a resolution check.
Analysis analyze_threshold(const PotentialSpec& spec, const GridSpec& grid, const AnalysisOptions& options = {});

}  // namespace ts
