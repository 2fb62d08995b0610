#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "thresholdscope/clifford.hpp"
#include "thresholdscope/greens.hpp"
#include "thresholdscope/report.hpp"
#include "thresholdscope/riesz.hpp"

using namespace ts;

namespace {

enum Exit { ok = 0, validation = 2, solver = 3 };

Eigen::VectorXd parse_point(const std::string& s, int n, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + ": '" + item + "' is not a number");
        }
    }
    if (int(v.size()) != n) {
        std::ostringstream os;
        os << what << " needs " << n << " comma-separated coordinates, got " << v.size();
        throw ValidationError(os.str());
    }
    return Eigen::Map<Eigen::VectorXd>(v.data(), n);
}

Json matrix_json(const CMat& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(Json{{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
        rows.push_back(row);
    }
    return rows;
}

int clifford_check(int max_dim) {
    if (max_dim < 2) throw ValidationError("--max-dim must be at least 2");
    bool pass = true;
    std::printf("%3s %4s %14s %14s\n", "n", "N", "anticommutator", "hermiticity");
    for (int n = 2; n <= max_dim; ++n) {
        const CliffordRep rep = build_clifford(n);
        const double a = anticommutator_residual(rep), h = hermiticity_residual(rep);
        pass = pass && a <= 1e-12 && h <= 1e-12 && rep.N == (1 << ((n + 1) / 2));
        std::printf("%3d %4d %14.3e %14.3e\n", n, rep.N, a, h);
    }
    std::printf("%s\n", pass ? "clifford relations hold" : "clifford relations FAILED");
    return pass ? ok : solver;
}

struct GreenArgs {
    std::string family = "schrodinger";
    int n = 3;
    double m = 0.0;
    int sign = 1;
    std::string x, y, z;
};

int green_eval(const GreenArgs& a) {
    const Family f = parse_family(a.family);
    const Eigen::VectorXd x = parse_point(a.x, a.n, "--x");
    const Eigen::VectorXd y = a.y.empty() ? Eigen::VectorXd::Zero(a.n) : parse_point(a.y, a.n, "--y");
    const bool threshold = a.z.empty();
    cplx z = 0;
    if (!threshold) {
        const Eigen::VectorXd zz = parse_point(a.z, 2, "--z");
        z = cplx(zz[0], zz[1]);
    }
    Json out{{"family", family_name(f)}, {"dimension", a.n}, {"x", std::vector<double>(x.data(), x.data() + a.n)},
             {"y", std::vector<double>(y.data(), y.data() + a.n)}};
    out["z"] = threshold ? Json("threshold") : Json{{"re", z.real()}, {"im", z.imag()}};
    CMat value;
    if (f == Family::schrodinger) {
        const double r = (x - y).norm();
        value = CMat::Constant(1, 1, threshold ? cplx(schrodinger_green_threshold(a.n, r)) : schrodinger_green(a.n, z, r));
    } else {
        const CliffordRep rep = build_clifford(a.n);
        if (f == Family::dirac_massless)
            value = threshold ? massless_threshold_kernel(rep, x - y).value : massless_dirac_green(rep, z, x, y).value;
        else {
            if (!(a.m > 0)) throw ValidationError("--mass must be positive for dirac_massive");
            out["mass"] = a.m;
            if (threshold) out["threshold"] = a.sign > 0 ? "+m" : "-m";
            value = threshold ? massive_threshold_kernel(rep, a.m, a.sign, x - y).value
                              : massive_dirac_green(rep, a.m, z, x, y).value;
        }
    }
    out["kernel"] = matrix_json(value);
    out["opnorm"] = make_kernel_value(value).opnorm;
    std::cout << out.dump(2) << "\n";
    return ok;
}

int riesz_verify(int level) {
    const double pi = std::numbers::pi;
    struct Row {
        std::string name;
        ClosedFormCheck c;
        double expected;
    };
    Eigen::VectorXd x(3), w(3);
    x << 0.3, -0.2, 0.5;
    w << -0.4, 0.1, 0.2;
    std::vector<Row> rows = {
        {"beta_integral(1,1,3)", beta_integral(1, 1, 3, level), pi * pi * pi},
        {"beta_integral(1,2,5)", beta_integral(1, 2, 5, level), 4 * pi * pi},
        {"composition(1,1,3)", composition_check(1, 1, 3, x, w, level), 0.0},
        {"composition(1.5,0.5,3)", composition_check(1.5, 0.5, 3, x, w, level), 0.0},
    };
    bool pass = true;
    std::printf("%-24s %18s %18s %10s\n", "check", "quadrature", "closed form", "rel err");
    for (const auto& r : rows) {
        double err = r.c.rel_err();
        if (r.expected != 0.0) err = std::max(err, std::abs(r.c.closed_form / r.expected - 1));
        pass = pass && err <= 1e-3;
        std::printf("%-24s %18.10f %18.10f %10.2e\n", r.name.c_str(), r.c.quadrature, r.c.closed_form, err);
    }
    std::printf("%s\n", pass ? "riesz identities hold" : "riesz identities FAILED");
    return pass ? ok : solver;
}

void emit(const std::string& path, const Json& j) {
    if (path.empty()) std::cout << j.dump(2) << "\n";
    else write_file(path, j.dump(2) + "\n");
}

int threshold_analyze(const std::string& config) {
    const RunConfig cfg = load_config(config);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    const Analysis a = run_analysis(cfg);
    if (cfg.output.json_path.empty()) {
        emit("", report_json(cfg, a));
    } else {
        std::printf("%s n=%d coupling=%.10g classification=%s sigma_min=%.3e states=%zu -> %s\n",
                    family_name(cfg.spec.family), cfg.spec.n, a.coupling,
                    classification_name(a.report.classification), a.report.sigma_min, a.report.states.size(),
                    cfg.output.json_path.c_str());
    }
    return ok;
}

int threshold_sweep(const std::string& config) {
    const RunConfig cfg = load_config(config);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    if (!cfg.sweep) throw ConfigError(config + ": threshold sweep needs a 'sweep' table");
    const auto crit = critical_coupling(cfg.spec, cfg.grid, cfg.sweep->lambda_min, cfg.sweep->lambda_max,
                                        cfg.sweep->tolerance);
    emit(cfg.output.json_path, sweep_json(cfg, crit));
    if (!cfg.output.json_path.empty())
        for (const auto& c : crit) std::printf("%.12g %s\n", c.lambda, c.channel.c_str());
    return ok;
}

void apply_thread_cap() {
    const char* env = std::getenv("THRESHOLDSCOPE_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (*end != '\0' || t < 1) throw ValidationError(std::string("THRESHOLDSCOPE_THREADS must be a positive integer, got '") + env + "'");
    omp_set_num_threads(int(t));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold resonance and eigenvalue analysis for Schrodinger and Dirac operators"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    auto* clifford = app.add_subcommand("clifford", "Clifford algebra generators");
    auto* clifford_chk = clifford->add_subcommand("check", "verify the anticommutation relations");
    int max_dim = 8;
    clifford_chk->add_option("--max-dim", max_dim, "largest dimension checked")->capture_default_str();
    clifford->require_subcommand(1);

    auto* green = app.add_subcommand("green", "free resolvent kernels");
    auto* green_ev = green->add_subcommand("eval", "evaluate a kernel at (x, y)");
    GreenArgs ga;
    green_ev->add_option("--family", ga.family, "schrodinger, dirac_massless or dirac_massive")->capture_default_str();
    green_ev->add_option("--dim", ga.n, "dimension")->capture_default_str();
    green_ev->add_option("--mass", ga.m, "mass (dirac_massive)");
    green_ev->add_option("--sign", ga.sign, "threshold +m (1) or -m (-1) for dirac_massive")->check(CLI::IsMember({-1, 1}));
    green_ev->add_option("--x", ga.x, "comma-separated point")->required();
    green_ev->add_option("--y", ga.y, "comma-separated point, default origin");
    green_ev->add_option("--z", ga.z, "spectral parameter re,im; omitted for the threshold kernel");
    green->require_subcommand(1);

    auto* riesz = app.add_subcommand("riesz", "Riesz potential identities");
    auto* riesz_ver = riesz->add_subcommand("verify", "beta integrals and composition");
    int level = 3;
    riesz_ver->add_option("--level", level, "cubature refinement level")->capture_default_str();
    riesz->require_subcommand(1);

    auto* threshold = app.add_subcommand("threshold", "Birman-Schwinger threshold analysis");
    std::string config;
    auto* analyze = threshold->add_subcommand("analyze", "classify the threshold");
    analyze->add_option("--config", config, "YAML configuration")->required();
    auto* sweep = threshold->add_subcommand("sweep", "critical couplings in the sweep range");
    sweep->add_option("--config", config, "YAML configuration")->required();
    threshold->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : validation;
    }

    try {
        apply_thread_cap();
        if (clifford_chk->parsed()) return clifford_check(max_dim);
        if (green_ev->parsed()) return green_eval(ga);
        if (riesz_ver->parsed()) return riesz_verify(level);
        if (analyze->parsed()) return threshold_analyze(config);
        if (sweep->parsed()) return threshold_sweep(config);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation;
    } catch (const SolverError& e) {
        std::cerr << "solver error [" << e.stage() << "]: " << e.what() << "\n";
        return solver;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return solver;
    }
    return validation;
}
