#include "thresholdscope/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thresholdscope/errors.hpp"

namespace ts {

namespace {

struct Pass {
    std::vector<ChannelResult> channels;
    std::vector<StateReport> states;
    double sigma_min = 1.0;
    std::vector<cplx> near;
};

Pass run_pass(const PotentialSpec& spec, const GridSpec& grid, const AnalysisOptions& opt,
              const std::vector<double>& shells, double l2_radius) {
    Pass pass;
    const std::vector<double> kappas = grid.kind == GridKind::full ? std::vector<double>{0.0} : lowest_channels(spec);
    for (double kappa : kappas) {
        const BSOperator op = assemble(spec, grid, kappa);
        const Spectrum sp = bs_spectrum(op, opt.eigenpairs);
        ChannelResult ch;
        ch.channel = op.channel;
        ch.kappa = op.kappa;
        ch.sigma_min = sp.sigma_min;
        ch.solver = sp.solver;
        pass.sigma_min = std::min(pass.sigma_min, sp.sigma_min);
        for (const auto& p : sp.pairs) {
            if (std::abs(p.mu + 1.0) > opt.tol.eps_sing) continue;
            ch.near_minus_one.push_back(p.mu);
            pass.near.push_back(p.mu);
            ReconstructedState st = reconstruct_state(op, p, shells);
            StateReport sr;
            sr.channel = op.channel;
            sr.mu = p.mu;
            sr.residual = st.residual;
            sr.decay = decay_fit(st, shells.front(), shells.back(), op.support);
            sr.l2 = l2_trend(op, st, l2_radius);
            pass.states.push_back(sr);
            ch.states.push_back(std::move(st));
        }
        pass.channels.push_back(std::move(ch));
    }
    return pass;
}

double relative_change(double fine, double coarse) {
    return std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
}

}  // namespace

Analysis analyze_threshold(const PotentialSpec& spec, const GridSpec& grid, const AnalysisOptions& options) {
    Analysis out;
    out.warnings = validate(spec);
    out.spec = spec;
    out.grid = grid;
    out.options = options;
    out.support = support_radius(spec);
    const double a = out.support > 0 ? out.support : 1.0;
    out.shells = options.shells.empty() ? default_shells(a) : options.shells;
    std::sort(out.shells.begin(), out.shells.end());
    if (out.shells.front() <= out.support) throw ValidationError("shell window must lie outside the potential support");
    out.extent = grid.kind == GridKind::full && grid.full_grid_extent > 0 ? grid.full_grid_extent : a;

    std::vector<CriticalCoupling> crit;
    if (options.sweep) {
        crit = critical_coupling(spec, grid, options.sweep->lambda_min, options.sweep->lambda_max,
                                 options.sweep->tolerance);
        out.coupling = crit.empty() ? spec.coupling : crit.front().lambda;
    } else {
        out.coupling = spec.coupling;
    }
    if (options.sweep && crit.empty()) {
        std::ostringstream os;
        os << "no critical coupling in [" << options.sweep->lambda_min << ", " << options.sweep->lambda_max
           << "]; analyzed at coupling " << out.coupling;
        out.warnings.push_back(os.str());
    }
    out.spec.coupling = out.coupling;
    const double l2_radius = options.l2_radius > 0 ? options.l2_radius : 10 * out.extent;

    Pass fine = run_pass(out.spec, grid, options, out.shells, l2_radius);
    out.channels = fine.channels;
    out.report = classify_threshold(spec.family, spec.n, fine.sigma_min, fine.near, fine.states, options.tol);
    out.report.lambda_critical = crit;

    if (options.refinement_check && !fine.near.empty()) {
        Refinement r;
        r.coarse = grid;
        if (grid.kind == GridKind::radial) {
            r.coarse.radial_nodes = std::max(8, grid.radial_nodes / 2);
        } else {
            const double h = grid.spacing > 0 ? grid.spacing : out.extent / 12.0;
            r.coarse.spacing = 2 * h;
        }
        const Pass coarse = run_pass(out.spec, r.coarse, options, out.shells, l2_radius);
        for (const auto& f : fine.states) {
            double best_mu = 1e300, best_gamma = 1e300;
            for (const auto& c : coarse.states) {
                if (c.channel != f.channel) continue;
                best_mu = std::min(best_mu, std::abs(f.mu - c.mu) / std::abs(f.mu));
                best_gamma = std::min(best_gamma, relative_change(f.decay.gamma, c.decay.gamma));
            }
            // A state lost on the coarse grid counts as full drift.
            if (best_mu == 1e300) best_mu = best_gamma = 1.0;
            r.mu_drift = std::max(r.mu_drift, best_mu);
            r.gamma_drift = std::max(r.gamma_drift, best_gamma);
        }
        r.stable = r.mu_drift < 0.01 && r.gamma_drift < 0.01;
        if (!r.stable) {
            std::ostringstream os;
            os << "refinement drift above 1%: eigenvalue " << r.mu_drift << ", decay exponent " << r.gamma_drift;
            out.report.notes.push_back(os.str());
        }
        out.refinement = r;
    }
    return out;
}

}  // namespace ts
