#include "thresholdscope/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>
#include <yaml-cpp/yaml.h>

namespace ts {

namespace {

// A YAML mapping with typed lookups, tracking consumed keys so leftovers can be reported.
class Table {
public:
    Table(YAML::Node node, std::string path, const std::string& source)
        : node_(std::move(node)), path_(std::move(path)), source_(source) {
        if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_, "expected a table");
    }

    bool has(const std::string& key) const { return node_ && node_[key]; }

    template <class T>
    T get(const std::string& key, const T& fallback) {
        if (!has(key)) return fallback;
        return as<T>(key);
    }

    template <class T>
    T require(const std::string& key) {
        if (!has(key)) fail(node_, "missing required key '" + qualified(key) + "'");
        return as<T>(key);
    }

    Table sub(const std::string& key) {
        used_.insert(key);
        return Table(has(key) ? node_[key] : YAML::Node(), qualified(key), source_);
    }

    std::vector<double> list(const std::string& key) {
        if (!has(key)) fail(node_, "missing required key '" + qualified(key) + "'");
        used_.insert(key);
        const YAML::Node n = node_[key];
        if (!n.IsSequence()) fail(n, "'" + qualified(key) + "' must be a list of numbers");
        std::vector<double> out;
        for (const auto& e : n) {
            try {
                out.push_back(e.as<double>());
            } catch (const YAML::Exception&) {
                fail(e, "'" + qualified(key) + "' must be a list of numbers");
            }
        }
        return out;
    }

    [[noreturn]] void fail_key(const std::string& key, const std::string& what) const {
        fail(has(key) ? node_[key] : node_, qualified(key) + ": " + what);
    }

    // Rejects keys that no lookup consumed.
    void finish() const {
        if (!node_) return;
        for (const auto& kv : node_) {
            const std::string k = kv.first.as<std::string>();
            if (!used_.count(k)) fail(kv.first, "unknown key '" + qualified(k) + "'");
        }
    }

    [[noreturn]] void fail(const YAML::Node& at, const std::string& what) const {
        std::ostringstream os;
        os << source_;
        if (at && at.Mark().line >= 0) os << ":" << at.Mark().line + 1;
        os << ": " << what;
        throw ConfigError(os.str());
    }

private:
    template <class T>
    T as(const std::string& key) {
        used_.insert(key);
        try {
            return node_[key].as<T>();
        } catch (const YAML::Exception&) {
            fail(node_[key], "'" + qualified(key) + "' has the wrong type");
        }
    }

    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    YAML::Node node_;
    std::string path_;
    const std::string& source_;
    std::set<std::string> used_;
};

RadialTable read_table(Table t) {
    RadialTable r{t.list("r"), t.list("v")};
    t.finish();
    return r;
}

Shape read_shape(Table t) {
    const std::string type = t.require<std::string>("type");
    Shape s;
    if (type == "square_well") {
        s = SquareWell{t.get("depth", 1.0), t.get("radius", 1.0)};
    } else if (type == "gaussian") {
        s = GaussianWell{t.get("amplitude", 1.0), t.get("width", 1.0)};
    } else if (type == "radial_table") {
        s = RadialTable{t.list("r"), t.list("v")};
    } else if (type == "em_coupling") {
        s = EmCoupling{read_table(t.sub("v")), read_table(t.sub("a"))};
    } else {
        t.fail_key("type", "unknown shape '" + type + "'");
    }
    t.finish();
    return s;
}

Threshold parse_threshold(Table& t, Family f) {
    const std::string def = f == Family::dirac_massive ? "+m" : "0";
    const std::string s = t.get<std::string>("threshold", def);
    if (s == "0" || s == "zero") return Threshold::zero;
    if (s == "+m" || s == "plus_m") return Threshold::plus_m;
    if (s == "-m" || s == "minus_m") return Threshold::minus_m;
    t.fail_key("threshold", "expected 0, +m or -m");
}

void check_writable(const std::string& path, const std::string& key, const std::string& source) {
    if (path.empty()) return;
    namespace fs = std::filesystem;
    const fs::path dir = fs::absolute(fs::path(path)).parent_path();
    if (!fs::is_directory(dir) || ::access(dir.c_str(), W_OK) != 0)
        throw ConfigError(source + ": " + key + ": directory '" + dir.string() + "' is not writable");
    if (fs::is_directory(path)) throw ConfigError(source + ": " + key + ": '" + path + "' is a directory");
}

}  // namespace

std::vector<double> RunConfig::shells() const {
    const double a = support_radius(spec);
    const double base = a > 0 ? a : 1.0;
    const double r1 = shell_window.r1 > 0 ? shell_window.r1 : 2 * base;
    const double r2 = shell_window.r2 > 0 ? shell_window.r2 : 40 * base;
    return log_shells(r1, r2, shell_window.count);
}

AnalysisOptions RunConfig::options() const {
    AnalysisOptions o;
    o.sweep = sweep;
    o.shells = shells();
    o.l2_radius = l2_radius;
    o.tol = tol;
    o.refinement_check = refinement_check;
    return o;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        std::ostringstream os;
        os << source << ":" << e.mark.line + 1 << ": parse error: " << e.msg;
        throw ConfigError(os.str());
    }
    RunConfig cfg;
    cfg.source = source;
    if (!doc || doc.IsNull()) throw ConfigError(source + ": empty configuration");
    Table root(doc, "", source);

    Table pot = root.sub("potential");
    if (!root.has("potential")) root.fail(doc, "missing required table 'potential'");
    PotentialSpec& s = cfg.spec;
    const std::string fam = pot.require<std::string>("family");
    try {
        s.family = parse_family(fam);
    } catch (const ValidationError&) {
        pot.fail_key("family", "unknown family '" + fam + "' (schrodinger, dirac_massless, dirac_massive)");
    }
    s.n = pot.require<int>("dimension");
    if (s.family == Family::dirac_massive) {
        if (!pot.has("mass")) pot.fail_key("mass", "required for the dirac_massive family");
        s.m = pot.require<double>("mass");
    } else {
        s.m = pot.get("mass", 0.0);
    }
    s.threshold = parse_threshold(pot, s.family);
    s.coupling = pot.get("coupling", 1.0);
    s.rho = pot.get("rho", 10.0);
    s.shape = pot.has("shape") ? read_shape(pot.sub("shape")) : Shape{SquareWell{}};
    pot.finish();

    Table grid = root.sub("grid");
    const std::string kind = grid.get<std::string>("kind", "radial");
    if (kind == "radial") cfg.grid.kind = GridKind::radial;
    else if (kind == "full") cfg.grid.kind = GridKind::full;
    else grid.fail_key("kind", "expected radial or full");
    cfg.grid.radial_nodes = grid.get("radial_nodes", 2000);
    cfg.grid.full_grid_extent = grid.get("full_grid_extent", 0.0);
    cfg.grid.spacing = grid.get("spacing", 0.0);
    cfg.grid.memory_limit_mib = grid.get("memory_limit_mib", 2048.0);
    cfg.l2_radius = grid.get("l2_radius", 0.0);
    cfg.refinement_check = grid.get("refinement_check", true);
    if (cfg.grid.radial_nodes < 16) grid.fail_key("radial_nodes", "must be at least 16");
    if (cfg.grid.full_grid_extent < 0) grid.fail_key("full_grid_extent", "must be positive");
    if (cfg.grid.spacing < 0) grid.fail_key("spacing", "must be positive");
    if (!(cfg.grid.memory_limit_mib > 0)) grid.fail_key("memory_limit_mib", "must be positive");
    if (cfg.l2_radius < 0) grid.fail_key("l2_radius", "must be positive");
    if (grid.has("shell_window")) {
        Table w = grid.sub("shell_window");
        cfg.shell_window.r1 = w.require<double>("r1");
        cfg.shell_window.r2 = w.require<double>("r2");
        cfg.shell_window.count = w.get("count", 16);
        if (!(cfg.shell_window.r1 > 0) || !(cfg.shell_window.r2 > cfg.shell_window.r1))
            w.fail_key("r2", "window needs 0 < r1 < r2");
        if (cfg.shell_window.count < 8) w.fail_key("count", "at least 8 shells are needed for a decay fit");
        w.finish();
    }
    grid.finish();

    if (root.has("sweep")) {
        Table sw = root.sub("sweep");
        Sweep sweep;
        sweep.lambda_min = sw.get("lambda_min", 0.0);
        sweep.lambda_max = sw.require<double>("lambda_max");
        sweep.tolerance = sw.get("tolerance", 1e-8);
        if (!(sweep.lambda_min >= 0) || !(sweep.lambda_max > sweep.lambda_min))
            sw.fail_key("lambda_max", "sweep needs 0 <= lambda_min < lambda_max");
        if (!(sweep.tolerance > 0)) sw.fail_key("tolerance", "must be positive");
        sw.finish();
        cfg.sweep = sweep;
    }

    if (root.has("tolerances")) {
        Table t = root.sub("tolerances");
        cfg.tol.eps_sing = t.get("eps_sing", cfg.tol.eps_sing);
        cfg.tol.l2_stable = t.get("l2_stable", cfg.tol.l2_stable);
        cfg.tol.gamma_tie = t.get("gamma_tie", cfg.tol.gamma_tie);
        if (!(cfg.tol.eps_sing > 0) || !(cfg.tol.l2_stable > 0) || !(cfg.tol.gamma_tie >= 0))
            t.fail(doc["tolerances"], "tolerances must be positive");
        t.finish();
    }

    if (root.has("output")) {
        Table out = root.sub("output");
        cfg.output.json_path = out.get<std::string>("json", "");
        cfg.output.csv_path = out.get<std::string>("csv", "");
        out.finish();
        check_writable(cfg.output.json_path, "output.json", source);
        check_writable(cfg.output.csv_path, "output.csv", source);
    }
    root.finish();

    try {
        cfg.warnings = validate(s);
    } catch (const ValidationError& e) {
        throw ConfigError(source + ": potential: " + e.what());
    }
    const double a = support_radius(s);
    const std::vector<double> sh = cfg.shells();
    if (sh.front() <= a) {
        std::ostringstream os;
        os << source << ": grid.shell_window: r1 = " << sh.front() << " lies inside the potential support (radius " << a
           << ")";
        throw ConfigError(os.str());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open configuration");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace ts
