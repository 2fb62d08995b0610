#include "thresholdscope/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "thresholdscope/errors.hpp"

namespace ts {

namespace {

constexpr double pi = std::numbers::pi;

double sphere_measure(int n) {  // area of S^{n-1}
    return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

Rule1D compute_gauss_legendre(int order) {
    Rule1D r;
    r.x.resize(order);
    r.w.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = -x;
        r.x[order - 1 - i] = x;
        r.w[i] = r.w[order - 1 - i] = w;
    }
    if (order % 2 == 1) r.x[order / 2] = 0.0;
    return r;
}

struct Frame {
    Eigen::VectorXd e, f, g;  // e: axis; f, g: orthonormal complement directions (g only for n = 3)
};

Frame make_frame(int n, const Eigen::VectorXd& axis) {
    Frame fr;
    fr.e = axis.normalized();
    auto orth = [&](const std::vector<Eigen::VectorXd>& against) {
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd v = Eigen::VectorXd::Unit(n, j);
            for (const auto& a : against) v -= v.dot(a) * a;
            if (v.norm() > 0.5) return Eigen::VectorXd(v.normalized());
        }
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd v = Eigen::VectorXd::Unit(n, j);
            for (const auto& a : against) v -= v.dot(a) * a;
            if (v.norm() > 1e-8) return Eigen::VectorXd(v.normalized());
        }
        return Eigen::VectorXd(Eigen::VectorXd::Zero(n));
    };
    fr.f = orth({fr.e});
    if (n == 3) fr.g = orth({fr.e, fr.f});
    return fr;
}

// Directions on S^{n-1} with weights; for axisymmetric rules the weight already carries
// omega_{n-2} sin^{n-2}(theta).
struct Direction {
    Eigen::VectorXd u;
    double w;
};

struct DirectionalFeature {  // a point at distance s from the polar origin along unit vector a
    Eigen::VectorXd a;
    double s;
    double delta;
};

void add_angle_breaks(std::vector<double>& br, double t, const DirectionalFeature& c, double theta0, bool mirror) {
    for (double rho : {0.5 * c.delta, c.delta, 2.0 * c.delta, 4.0 * c.delta}) {
        const double cs = (t * t + c.s * c.s - rho * rho) / (2.0 * t * c.s);
        if (cs <= -1.0 || cs >= 1.0) continue;
        const double th = std::acos(cs);
        br.push_back(mirror ? theta0 - th : theta0 + th);
        if (!mirror) br.push_back(theta0 - th);
    }
}

std::vector<double> finalize_breaks(std::vector<double> br, double lo, double hi, int min_panels) {
    for (int k = 1; k < min_panels; ++k) br.push_back(lo + (hi - lo) * k / min_panels);
    br.push_back(lo);
    br.push_back(hi);
    std::vector<double> out;
    for (double b : br)
        if (b >= lo && b <= hi) out.push_back(b);
    std::sort(out.begin(), out.end());
    std::vector<double> uniq;
    for (double b : out)
        if (uniq.empty() || b - uniq.back() > 1e-12 * (1.0 + std::abs(b))) uniq.push_back(b);
    if (uniq.back() < hi) uniq.back() = hi;
    return uniq;
}

class SphereRules {
public:
    SphereRules(int n, const Frame& fr, bool axisym, int order)
        : n_(n), fr_(fr), axisym_(axisym), order_(order) {}

    // Directions for a shell at radius t about the polar origin; features steer the panels.
    std::vector<Direction> directions(double t, const std::vector<DirectionalFeature>& feats) const {
        std::vector<Direction> out;
        if (axisym_) {
            // Features lie on the axis (theta = 0 or pi).
            std::vector<double> br;
            for (const auto& c : feats) {
                const bool forward = c.a.dot(fr_.e) > 0;
                if (forward) add_angle_breaks(br, t, c, 0.0, false);
                else add_angle_breaks(br, t, c, pi, true);
            }
            const auto panels = finalize_breaks(br, 0.0, pi, 4);
            const Rule1D rr = composite_rule(panels, order_);
            const double om = sphere_measure(n_ - 1);
            for (std::size_t i = 0; i < rr.size(); ++i) {
                const double th = rr.x[i];
                out.push_back({std::cos(th) * fr_.e + std::sin(th) * fr_.f, rr.w[i] * om * std::pow(std::sin(th), n_ - 2)});
            }
            return out;
        }
        if (n_ == 2) {
            std::vector<double> br;
            for (const auto& c : feats) {
                const double phi0 = std::atan2(c.a.dot(fr_.f), c.a.dot(fr_.e));
                std::vector<double> local;
                add_angle_breaks(local, t, c, 0.0, false);
                br.push_back(phi0);
                for (double b : local) br.push_back(phi0 + b);
            }
            for (double& b : br) {
                while (b < 0) b += 2 * pi;
                while (b >= 2 * pi) b -= 2 * pi;
            }
            const auto panels = finalize_breaks(br, 0.0, 2 * pi, 8);
            const Rule1D rr = composite_rule(panels, order_);
            for (std::size_t i = 0; i < rr.size(); ++i)
                out.push_back({std::cos(rr.x[i]) * fr_.e + std::sin(rr.x[i]) * fr_.f, rr.w[i]});
            return out;
        }
        if (n_ == 3) {
            std::vector<double> br;
            for (const auto& c : feats) {
                const double cs = c.a.dot(fr_.e);
                if (cs > 1 - 1e-12) add_angle_breaks(br, t, c, 0.0, false);
                else if (cs < -1 + 1e-12) add_angle_breaks(br, t, c, pi, true);
            }
            const auto panels = finalize_breaks(br, 0.0, pi, 4);
            const Rule1D rr = composite_rule(panels, order_);
            const int nphi = 8 * order_;
            for (std::size_t i = 0; i < rr.size(); ++i) {
                const double th = rr.x[i];
                for (int k = 0; k < nphi; ++k) {
                    const double ph = 2 * pi * (k + 0.5) / nphi;
                    Eigen::VectorXd u = std::cos(th) * fr_.e + std::sin(th) * (std::cos(ph) * fr_.f + std::sin(ph) * fr_.g);
                    out.push_back({u, rr.w[i] * std::sin(th) * 2 * pi / nphi});
                }
            }
            return out;
        }
        throw ValidationError("non-axisymmetric cubature is available for n = 2, 3 only");
    }

private:
    int n_;
    Frame fr_;
    bool axisym_;
    int order_;
};

struct Patch {
    Eigen::VectorXd c;
    double sigma;
    double delta;
};

}  // namespace

const Rule1D& gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, Rule1D> cache;
    if (order < 1) throw ValidationError("Gauss-Legendre order must be positive");
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

Rule1D composite_rule(const std::vector<double>& breaks, int order) {
    const Rule1D& g = gauss_legendre(order);
    Rule1D out;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        const double h = 0.5 * (b - a), c = 0.5 * (a + b);
        for (std::size_t i = 0; i < g.size(); ++i) {
            out.x.push_back(c + h * g.x[i]);
            out.w.push_back(h * g.w[i]);
        }
    }
    return out;
}

std::vector<double> graded_breaks(double a, double b, double h, double ratio) {
    std::vector<double> out{a};
    double x = a;
    while (x < b) {
        const double step = std::max(h, ratio * std::abs(x));
        x = (b - x <= step * 1.25) ? b : x + step;
        out.push_back(x);
    }
    return out;
}

double smooth_cut(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    const double u = 2.0 * s - 1.0;  // transition variable in (0, 1)
    const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
    return b / (a + b);
}

NodeSet polar_rule(int n, const std::vector<Center>& centers, const PolarRuleOptions& opt) {
    if (n < 1) throw ValidationError("dimension must be positive");
    if (opt.origin.size() != n) throw ValidationError("polar origin has the wrong dimension");
    if (opt.level < 0) throw ValidationError("quadrature level must be nonnegative");
    const Eigen::VectorXd& o = opt.origin;
    const double inf = std::numeric_limits<double>::infinity();
    const bool finite = opt.outer_radius < inf;
    if (!finite && !(opt.decay > n)) throw ValidationError("infinite domain needs decay exponent > n");

    double origin_sigma = 0.0;
    std::vector<Patch> patches;
    for (const auto& c : centers) {
        if (c.x.size() != n) throw ValidationError("center has the wrong dimension");
        if (!(c.sigma > -n)) throw ValidationError("non-integrable point singularity");
        if ((c.x - o).norm() <= 1e-12 * (1.0 + o.norm())) origin_sigma = std::min(origin_sigma, c.sigma);
        else patches.push_back({c.x, c.sigma, 0.0});
    }
    for (auto& p : patches) {
        double dmin = (p.c - o).norm();
        for (const auto& q : patches)
            if (&q != &p) dmin = std::min(dmin, (p.c - q.c).norm());
        p.delta = std::min(opt.patch_fraction * dmin, 2.0 * opt.scale);
        if (finite) p.delta = std::min(p.delta, 0.5 * (opt.outer_radius - (p.c - o).norm()));
        if (!(p.delta > 0)) throw ValidationError("singular point on or outside the outer boundary");
    }

    Eigen::VectorXd axis = Eigen::VectorXd::Unit(n, 0);
    if (!patches.empty()) axis = patches.front().c - o;
    if (opt.axisymmetric) {
        const Eigen::VectorXd e = axis.normalized();
        for (const auto& p : patches) {
            const Eigen::VectorXd v = p.c - o;
            if ((v - v.dot(e) * e).norm() > 1e-10 * v.norm())
                throw ValidationError("axisymmetric rule needs centers collinear with the origin");
        }
    } else if (n > 3) {
        throw ValidationError("non-axisymmetric cubature is available for n = 2, 3 only");
    }

    const int order = 4 + 2 * opt.level;
    const Frame frame = make_frame(n, axis);
    const SphereRules sphere(n, frame, opt.axisymmetric, order);

    std::vector<Eigen::VectorXd> pts;
    std::vector<double> wts;
    auto remainder_weight = [&](const Eigen::VectorXd& y) {
        double s = 1.0;
        for (const auto& p : patches) s -= smooth_cut((y - p.c).norm() / p.delta);
        return s;
    };

    // Patches: polar about each center, rho = delta u^q makes the radial factor polynomial.
    for (const auto& p : patches) {
        const double a = n + p.sigma;
        const double m = std::ceil(a - 1e-12);
        const double q = m / a;
        std::vector<double> rb = graded_breaks(0.0, 0.5 * p.delta, opt.scale);
        for (int k = 1; k <= 4; ++k) rb.push_back(0.5 * p.delta * (1.0 + 0.25 * k));
        std::vector<double> ub;
        for (double r : rb) ub.push_back(std::pow(r / p.delta, 1.0 / q));
        std::sort(ub.begin(), ub.end());
        ub.erase(std::unique(ub.begin(), ub.end()), ub.end());
        const Rule1D ur = composite_rule(ub, order);
        // Frame for the patch: axis towards the polar origin keeps collinear centers on it.
        Frame pf = frame;
        std::vector<DirectionalFeature> none;
        const SphereRules psphere(n, pf, opt.axisymmetric, order);
        const auto dirs = psphere.directions(p.delta, none);
        for (std::size_t i = 0; i < ur.size(); ++i) {
            const double u = ur.x[i];
            const double rho = p.delta * std::pow(u, q);
            const double jac = p.delta * q * std::pow(u, q - 1.0) * std::pow(rho, n - 1);
            const double chi = smooth_cut(rho / p.delta);
            if (chi == 0.0) continue;
            for (const auto& d : dirs) {
                pts.push_back(p.c + rho * d.u);
                wts.push_back(ur.w[i] * jac * chi * d.w);
            }
        }
    }

    // Remainder: polar about the origin.
    std::vector<DirectionalFeature> feats;
    std::vector<double> rbreaks{0.0};
    double far = opt.scale;
    for (const auto& p : patches) {
        const Eigen::VectorXd v = p.c - o;
        const double s = v.norm();
        feats.push_back({v / s, s, p.delta});
        for (double off : {-1.0, -0.5, 0.0, 0.5, 1.0}) rbreaks.push_back(s + off * p.delta);
        far = std::max(far, s + p.delta);
    }
    const double tail_start = finite ? opt.outer_radius : 2.0 * far;
    rbreaks.push_back(tail_start);
    std::sort(rbreaks.begin(), rbreaks.end());
    // Panel length grows with the distance to the nearest special radius.
    std::vector<double> marks{0.0};
    for (const auto& f : feats) marks.push_back(f.s);
    auto step_at = [&](double t) {
        double dist = std::numeric_limits<double>::infinity();
        for (double s : marks) dist = std::min(dist, std::abs(t - s));
        return std::max(0.5 * opt.scale, 0.5 * dist);
    };
    std::vector<double> fine{0.0};
    for (std::size_t k = 0; k + 1 < rbreaks.size(); ++k) {
        const double a = rbreaks[k], b = rbreaks[k + 1];
        if (b - a <= 1e-14) continue;
        double x = a;
        while (x < b) {
            // Step from both ends so the grading is symmetric about interior marks.
            const double st = std::min(step_at(x), step_at(std::min(b, x + step_at(x))));
            x = (b - x <= 1.25 * st) ? b : x + st;
            fine.push_back(x);
        }
    }

    auto add_shell = [&](double t, double wr) {
        const auto dirs = sphere.directions(t, feats);
        for (const auto& d : dirs) {
            const Eigen::VectorXd y = o + t * d.u;
            const double rw = remainder_weight(y);
            if (rw <= 0.0) continue;
            pts.push_back(y);
            wts.push_back(wr * std::pow(t, n - 1) * d.w * rw);
        }
    };

    // First panel carries the origin singularity through t = b u^q.
    {
        const double b = fine[1];
        const double a = n + origin_sigma;
        const double m = std::ceil(a - 1e-12);
        const double q = m / a;
        const Rule1D ur = composite_rule({0.0, 0.25, 0.5, 1.0}, order);
        for (std::size_t i = 0; i < ur.size(); ++i) {
            const double u = ur.x[i];
            add_shell(b * std::pow(u, q), ur.w[i] * b * q * std::pow(u, q - 1.0));
        }
    }
    {
        std::vector<double> rest(fine.begin() + 1, fine.end());
        const Rule1D rr = composite_rule(rest, order);
        for (std::size_t i = 0; i < rr.size(); ++i) add_shell(rr.x[i], rr.w[i]);
    }
    if (!finite) {
        // t = T u^{-q} turns the t^{n-1-decay} tail into a polynomial in u.
        const double a = opt.decay - n;
        const double m = std::ceil(a - 1e-12);
        const double q = m / a;
        std::vector<double> ub{0.0};
        for (int k = 10; k >= 0; --k) ub.push_back(std::pow(0.5, k));
        const Rule1D ur = composite_rule(ub, order);
        for (std::size_t i = 0; i < ur.size(); ++i) {
            const double u = ur.x[i];
            const double t = tail_start * std::pow(u, -q);
            add_shell(t, ur.w[i] * tail_start * q * std::pow(u, -q - 1.0));
        }
    }

    NodeSet out;
    out.n = n;
    out.points.resize(n, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) out.points.col(static_cast<Eigen::Index>(i)) = pts[i];
    out.weights = std::move(wts);
    return out;
}

}  // namespace ts
