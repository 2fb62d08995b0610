#include "thresholdscope/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ts {

namespace {

Json complex_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json table_json(const RadialTable& t) { return Json{{"r", t.r}, {"v", t.v}}; }

Json shape_json(const Shape& s) {
    Json j{{"type", shape_name(s)}};
    if (const auto* w = std::get_if<SquareWell>(&s)) {
        j["depth"] = w->depth;
        j["radius"] = w->radius;
    } else if (const auto* g = std::get_if<GaussianWell>(&s)) {
        j["amplitude"] = g->amplitude;
        j["width"] = g->width;
    } else if (const auto* t = std::get_if<RadialTable>(&s)) {
        j["r"] = t->r;
        j["v"] = t->v;
    } else if (const auto* e = std::get_if<EmCoupling>(&s)) {
        j["v"] = table_json(e->v);
        j["a"] = table_json(e->a);
    }
    return j;
}

Json potential_json(const PotentialSpec& s) {
    return Json{{"family", family_name(s.family)}, {"dimension", s.n},        {"mass", s.m},
                {"threshold", threshold_name(s.threshold)}, {"shape", shape_json(s.shape)},
                {"coupling", s.coupling}, {"rho", s.rho}};
}

Json grid_json(const GridSpec& g) {
    Json j{{"kind", g.kind == GridKind::radial ? "radial" : "full"}};
    if (g.kind == GridKind::radial) {
        j["radial_nodes"] = g.radial_nodes;
    } else {
        j["full_grid_extent"] = g.full_grid_extent;
        j["spacing"] = g.spacing;
    }
    j["memory_limit_mib"] = g.memory_limit_mib;
    return j;
}

Json decay_json(const DecayFit& d) {
    return Json{{"value", d.gamma}, {"stderr", d.stderr_}, {"window", {d.r1, d.r2}}, {"shells", d.shells}};
}

Json l2_json(const L2Trend& t) {
    return Json{{"R", t.R},
                {"norms_squared", {t.norms[0], t.norms[1], t.norms[2]}},
                {"change_R_2R", t.change_R_2R()},
                {"change_2R_4R", t.change_2R_4R()}};
}

Json crit_json(const std::vector<CriticalCoupling>& crit) {
    Json j = Json::array();
    for (const auto& c : crit) j.push_back(Json{{"lambda", c.lambda}, {"channel", c.channel}});
    return j;
}

Json common_json(const RunConfig& cfg) {
    Json j;
    j["software"] = Json{{"name", "thresholdscope"}, {"version", version()}};
    j["potential"] = potential_json(cfg.spec);
    j["grid"] = grid_json(cfg.grid);
    if (cfg.sweep)
        j["sweep"] = Json{{"lambda_min", cfg.sweep->lambda_min},
                          {"lambda_max", cfg.sweep->lambda_max},
                          {"tolerance", cfg.sweep->tolerance}};
    else
        j["sweep"] = nullptr;
    j["tolerances"] = Json{{"eps_sing", cfg.tol.eps_sing},
                           {"l2_stable", cfg.tol.l2_stable},
                           {"gamma_tie", cfg.tol.gamma_tie},
                           {"refinement", 0.01},
                           {"kernel_residual", 1e-2}};
    return j;
}

std::string sig17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

}  // namespace

const char* version() { return THRESHOLDSCOPE_VERSION; }

Json report_json(const RunConfig& cfg, const Analysis& a) {
    Json j = common_json(cfg);
    const ThresholdReport& r = a.report;
    j["coupling"] = a.coupling;
    j["shells"] = a.shells;
    j["classification"] = classification_name(r.classification);
    j["sigma_min"] = r.sigma_min;
    Json near = Json::array();
    for (cplx z : r.bs_eigenvalues_near_minus_one) near.push_back(complex_json(z));
    j["bs_eigenvalues_near_minus_one"] = near;
    j["lambda_critical"] = crit_json(r.lambda_critical);
    j["decay_gamma"] = r.states.empty() ? Json(nullptr) : decay_json(r.states.front().decay);
    j["l2_trend"] = r.states.empty() ? Json(nullptr) : l2_json(r.states.front().l2);
    Json states = Json::array();
    std::size_t k = 0;
    for (const auto& ch : a.channels)
        for (const auto& st : ch.states) {
            const StateReport& s = r.states.at(k++);
            states.push_back(Json{{"channel", s.channel},
                                  {"mu", complex_json(s.mu)},
                                  {"residual", s.residual},
                                  {"kernel_residual", st.kernel_residual},
                                  {"decay_gamma", decay_json(s.decay)},
                                  {"l2_trend", l2_json(s.l2)},
                                  {"classification", classification_name(s.kind)}});
        }
    j["states"] = states;
    Json chans = Json::array();
    for (const auto& ch : a.channels) {
        Json nm = Json::array();
        for (cplx z : ch.near_minus_one) nm.push_back(complex_json(z));
        chans.push_back(Json{{"channel", ch.channel}, {"sigma_min", ch.sigma_min}, {"solver", ch.solver},
                             {"near_minus_one", nm}});
    }
    j["channels"] = chans;
    if (a.refinement)
        j["refinement"] = Json{{"grid", grid_json(a.refinement->coarse)},
                               {"mu_drift", a.refinement->mu_drift},
                               {"gamma_drift", a.refinement->gamma_drift},
                               {"stable", a.refinement->stable}};
    else
        j["refinement"] = nullptr;
    j["mixture"] = r.mixture;
    j["dimension_table_consistent"] = r.dimension_table_consistent;
    j["resonance_admissible"] = resonance_admissible(cfg.spec.family, cfg.spec.n);
    j["notes"] = r.notes;
    std::vector<std::string> warnings = cfg.warnings;
    for (const auto& w : a.warnings)
        if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    j["warnings"] = warnings;
    return j;
}

Json sweep_json(const RunConfig& cfg, const std::vector<CriticalCoupling>& crit) {
    Json j = common_json(cfg);
    j["lambda_critical"] = crit_json(crit);
    j["warnings"] = cfg.warnings;
    return j;
}

std::string shell_csv(const std::vector<ShellSample>& samples) {
    std::string out = "r,norm";
    const Eigen::Index comps = samples.empty() ? 0 : samples.front().components.size();
    for (Eigen::Index c = 0; c < comps; ++c)
        out += ",c" + std::to_string(c) + "_re,c" + std::to_string(c) + "_im";
    out += "\n";
    for (const auto& s : samples) {
        out += sig17(s.r) + "," + sig17(s.norm);
        for (Eigen::Index c = 0; c < s.components.size(); ++c)
            out += "," + sig17(s.components[c].real()) + "," + sig17(s.components[c].imag());
        out += "\n";
    }
    return out;
}

std::vector<std::string> csv_paths(const std::string& path, std::size_t states) {
    std::vector<std::string> out;
    const std::filesystem::path p(path);
    for (std::size_t k = 0; k < states; ++k) {
        if (k == 0) {
            out.push_back(path);
            continue;
        }
        std::filesystem::path q = p;
        q.replace_filename(p.stem().string() + "." + std::to_string(k) + p.extension().string());
        out.push_back(q.string());
    }
    return out;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ValidationError("write to '" + path + "' failed");
}

Analysis run_analysis(const RunConfig& cfg) {
    Analysis a = analyze_threshold(cfg.spec, cfg.grid, cfg.options());
    if (!cfg.output.json_path.empty()) write_file(cfg.output.json_path, report_json(cfg, a).dump(2) + "\n");
    if (!cfg.output.csv_path.empty()) {
        std::vector<const ReconstructedState*> states;
        for (const auto& ch : a.channels)
            for (const auto& st : ch.states) states.push_back(&st);
        const auto paths = csv_paths(cfg.output.csv_path, std::max<std::size_t>(states.size(), 1));
        if (states.empty()) write_file(paths[0], shell_csv({}));
        for (std::size_t k = 0; k < states.size(); ++k) write_file(paths[k], shell_csv(states[k]->psi_shells));
    }
    return a;
}

}  // namespace ts
