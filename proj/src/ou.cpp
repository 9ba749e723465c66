#include "ucimon/ou.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ucimon/csv.hpp"
#include "ucimon/errors.hpp"

namespace ucimon {

double Cov2::max_eigenvalue() const {
    const double tr = ee + nn;
    const double disc = std::sqrt((ee - nn) * (ee - nn) / 4.0 + en * en);
    return tr / 2.0 + disc;
}

double Cov2::min_eigenvalue() const {
    const double tr = ee + nn;
    const double disc = std::sqrt((ee - nn) * (ee - nn) / 4.0 + en * en);
    return tr / 2.0 - disc;
}

namespace {

// x - 2(1 - e^-x) + (1 - e^-2x)/2, so that var_pos = sigma^2 / gamma^3 * f(x).
// The series avoids the cancellation near x = 0, where f ~ x^3 / 3.
double integrated_variance_kernel(double x) {
    if (x < 1.0) {
        // sum_{n>=3} (-1)^(n+1) (2^(n-1) - 2) x^n / n!
        double xn_over_fact = x * x * x / 6.0;  // x^n / n! at n = 3
        double pow2 = 4.0;                       // 2^(n-1)
        double sum = 0.0;
        for (int n = 3; n < 60; ++n) {
            const double term = (pow2 - 2.0) * xn_over_fact;
            sum += (n % 2 == 1) ? term : -term;
            if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
            xn_over_fact *= x / static_cast<double>(n + 1);
            pow2 *= 2.0;
        }
        return sum;
    }
    return x + 2.0 * std::expm1(-x) - std::expm1(-2.0 * x) / 2.0;
}

// Per-step quantities of the exact integrated-OU transition, in units of sigma^2.
struct Step {
    double a;    // e^(-gamma dt)
    double b;    // (1 - a) / gamma
    double qxx;  // position variance / sigma^2
    double qxv;
    double qvv;
};

Step make_step(double gamma, double dt) {
    const double x = gamma * dt;
    Step s{};
    s.a = std::exp(-x);
    s.b = -std::expm1(-x) / gamma;
    s.qxx = integrated_variance_kernel(x) / (gamma * gamma * gamma);
    s.qxv = s.b * s.b / 2.0;
    s.qvv = -std::expm1(-2.0 * x) / (2.0 * gamma);
    return s;
}

}  // namespace

OuMoments ou_moments(double mu, double gamma, double sigma, double v0, double dt) {
    OuMoments m;
    if (dt == 0.0) {
        m.mean_vel = v0;
        return m;
    }
    const Step s = make_step(gamma, dt);
    const double s2 = sigma * sigma;
    m.mean_pos = mu * dt + (v0 - mu) * s.b;
    m.mean_vel = mu + s.a * (v0 - mu);
    m.var_pos = s2 * s.qxx;
    m.var_vel = s2 * s.qvv;
    m.cov_pos_vel = s2 * s.qxv;
    return m;
}

PlaneState predict_plane(const OuModel& model, double dt) {
    const OuMoments e = ou_moments(model.mu.east, model.gamma.east, model.sigma.east, model.v0.east, dt);
    const OuMoments n = ou_moments(model.mu.north, model.gamma.north, model.sigma.north, model.v0.north, dt);
    return {{e.mean_pos, n.mean_pos}, {e.mean_vel, n.mean_vel}};
}

Prediction predict(const OuModel& model, double t) {
    const double dt = t - model.anchor_t;
    if (dt < 0.0) throw InputError("predict: requested time precedes the model anchor");
    const OuMoments e = ou_moments(model.mu.east, model.gamma.east, model.sigma.east, model.v0.east, dt);
    const OuMoments n = ou_moments(model.mu.north, model.gamma.north, model.sigma.north, model.v0.north, dt);
    Prediction p;
    p.t = t;
    p.mean_pos = LocalFrame(model.anchor).unproject({e.mean_pos, n.mean_pos});
    p.mean_velocity = {e.mean_vel, n.mean_vel};
    p.cov = Cov2{e.var_pos, 0.0, n.var_pos};
    p.radius_3sigma_m = 3.0 * std::sqrt(std::max(0.0, p.cov.max_eigenvalue()));
    return p;
}

namespace {

struct AxisData {
    std::vector<double> dt;  // spacing between fixes
    std::vector<double> dx;  // displacement between fixes
};

struct AxisEstimate {
    double loglik = -std::numeric_limits<double>::infinity();
    double gamma = 0.0;
    double mu = 0.0;
    double sigma2 = 0.0;
    double v_last = 0.0;  // filtered velocity at the last fix
};

// Profile likelihood at a fixed gamma. The filter is run once with mu = 0
// while tracking d(innovation)/d(mu), which makes mu a weighted least-squares
// solve and sigma^2 a closed-form mean.
AxisEstimate evaluate_axis(const AxisData& ax, double gamma) {
    const std::size_t n = ax.dt.size();
    std::vector<double> e0(n), c(n), s(n);
    double p = 1.0 / (2.0 * gamma);  // stationary velocity variance / sigma^2
    double d = 0.0;                  // filtered velocity deviation, mu = 0 run
    double h = 0.0;                  // d(d)/d(mu)
    for (std::size_t k = 0; k < n; ++k) {
        const Step st = make_step(gamma, ax.dt[k]);
        const double var_x = st.b * st.b * p + st.qxx;
        const double cov_xv = st.a * st.b * p + st.qxv;
        const double var_v = st.a * st.a * p + st.qvv;
        e0[k] = ax.dx[k] - d * st.b;
        c[k] = -ax.dt[k] - h * st.b;
        s[k] = var_x;
        const double gain = cov_xv / var_x;
        d = st.a * d + gain * e0[k];
        h = st.a * h + gain * c[k];
        p = std::max(var_v - cov_xv * cov_xv / var_x, 0.0);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        num += e0[k] * c[k] / s[k];
        den += c[k] * c[k] / s[k];
    }
    AxisEstimate est;
    est.gamma = gamma;
    est.mu = den > 0.0 ? -num / den : 0.0;
    double ss = 0.0, logdet = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double r = e0[k] + est.mu * c[k];
        ss += r * r / s[k];
        logdet += std::log(s[k]);
    }
    est.sigma2 = ss / static_cast<double>(n);
    if (!(est.sigma2 > 0.0)) return est;
    est.loglik = -0.5 * (static_cast<double>(n) * std::log(est.sigma2) + logdet);
    est.v_last = est.mu + d + est.mu * h;
    return est;
}

AxisEstimate fit_axis(const AxisData& ax) {
    const double lo = std::log(kGammaMin), hi = std::log(kGammaMax);
    constexpr int kGrid = 141;
    std::vector<AxisEstimate> grid;
    grid.reserve(kGrid);
    std::size_t best = 0;
    for (int i = 0; i < kGrid; ++i) {
        const double lg = lo + (hi - lo) * i / (kGrid - 1);
        grid.push_back(evaluate_axis(ax, std::exp(lg)));
        if (grid.back().loglik > grid[best].loglik) best = grid.size() - 1;
    }
    // golden-section refinement between the neighbors of the best grid point
    double a = lo + (hi - lo) * static_cast<double>(best == 0 ? 0 : best - 1) / (kGrid - 1);
    double b = lo + (hi - lo) * static_cast<double>(std::min<std::size_t>(best + 1, kGrid - 1)) / (kGrid - 1);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    AxisEstimate f1 = evaluate_axis(ax, std::exp(x1)), f2 = evaluate_axis(ax, std::exp(x2));
    for (int it = 0; it < 80 && b - a > 1e-10; ++it) {
        if (f1.loglik >= f2.loglik) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = evaluate_axis(ax, std::exp(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = evaluate_axis(ax, std::exp(x2));
        }
    }
    AxisEstimate out = grid[best];
    if (f1.loglik > out.loglik) out = f1;
    if (f2.loglik > out.loglik) out = f2;
    return out;
}

GeoPoint centroid_of(const std::vector<const AisPoint*>& pts) {
    double x = 0, y = 0, z = 0;
    for (const auto* p : pts) {
        const double phi = deg2rad(p->pos.lat), lam = deg2rad(p->pos.lon);
        x += std::cos(phi) * std::cos(lam);
        y += std::cos(phi) * std::sin(lam);
        z += std::sin(phi);
    }
    return {rad2deg(std::atan2(z, std::hypot(x, y))), normalize_lon(rad2deg(std::atan2(y, x)))};
}

constexpr double kZeroNoiseSpread = 1e-6;  // m/s

}  // namespace

OuModel fit_ou(const Track& track, TimeWindow window) {
    std::vector<const AisPoint*> pts;
    for (const auto& p : track.points)
        if (window.contains(static_cast<double>(p.t))) pts.push_back(&p);
    if (pts.size() < kOuMinPoints)
        throw InsufficientData("fit_ou: need at least " + std::to_string(kOuMinPoints) + " fixes in the window, got " +
                               std::to_string(pts.size()));

    const LocalFrame frame(centroid_of(pts));
    std::vector<Vec2> xy;
    xy.reserve(pts.size());
    for (const auto* p : pts) xy.push_back(frame.project(p->pos));

    AxisData east, north;
    Vec2 vmin{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 vmax{-vmin.east, -vmin.north};
    Vec2 vsum;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double dt = static_cast<double>(pts[k + 1]->t - pts[k]->t);
        const Vec2 d = xy[k + 1] - xy[k];
        east.dt.push_back(dt);
        east.dx.push_back(d.east);
        north.dt.push_back(dt);
        north.dx.push_back(d.north);
        const Vec2 v{d.east / dt, d.north / dt};
        vmin = {std::min(vmin.east, v.east), std::min(vmin.north, v.north)};
        vmax = {std::max(vmax.east, v.east), std::max(vmax.north, v.north)};
        vsum = vsum + v;
    }

    OuModel model;
    model.anchor = pts.back()->pos;
    model.anchor_t = static_cast<double>(pts.back()->t);

    const double spread = std::max(vmax.east - vmin.east, vmax.north - vmin.north);
    if (spread < kZeroNoiseSpread) {
        const Vec2 vmean = (1.0 / static_cast<double>(east.dt.size())) * vsum;
        if (norm(vmean) < kZeroNoiseSpread)
            throw InsufficientData("fit_ou: degenerate track, all velocities are zero");
        model.mu = vmean;
        model.v0 = vmean;
        model.gamma = {kGammaMin, kGammaMin};
        model.sigma = {kSigmaFloor, kSigmaFloor};
        return model;
    }

    const AxisEstimate fe = fit_axis(east);
    const AxisEstimate fn = fit_axis(north);
    if (!std::isfinite(fe.loglik) || !std::isfinite(fn.loglik))
        throw InsufficientData("fit_ou: likelihood is degenerate on this window");
    model.mu = {fe.mu, fn.mu};
    model.gamma = {fe.gamma, fn.gamma};
    model.sigma = {std::max(std::sqrt(fe.sigma2), kSigmaFloor), std::max(std::sqrt(fn.sigma2), kSigmaFloor)};
    model.v0 = {fe.v_last, fn.v_last};
    return model;
}

void save_ou_model(std::ostream& out, const OuModel& m) {
    out << "mu_e=" << csv::format_double(m.mu.east) << '\n'
        << "mu_n=" << csv::format_double(m.mu.north) << '\n'
        << "gamma_e=" << csv::format_double(m.gamma.east) << '\n'
        << "gamma_n=" << csv::format_double(m.gamma.north) << '\n'
        << "sigma_e=" << csv::format_double(m.sigma.east) << '\n'
        << "sigma_n=" << csv::format_double(m.sigma.north) << '\n'
        << "anchor_lat=" << csv::format_double(m.anchor.lat) << '\n'
        << "anchor_lon=" << csv::format_double(m.anchor.lon) << '\n'
        << "anchor_t=" << csv::format_double(m.anchor_t) << '\n'
        << "v0_e=" << csv::format_double(m.v0.east) << '\n'
        << "v0_n=" << csv::format_double(m.v0.north) << '\n';
}

OuModel load_ou_model(std::istream& in) {
    std::map<std::string, double> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (csv::is_skippable(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("OU model: expected key=value, got '" + line + "'");
        const auto v = csv::parse_double(line.substr(eq + 1));
        if (!v) throw InputError("OU model: bad value in '" + line + "'");
        kv[csv::trim(line.substr(0, eq))] = *v;
    }
    const auto get = [&](const char* k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw InputError(std::string("OU model: missing ") + k);
        return it->second;
    };
    OuModel m;
    m.mu = {get("mu_e"), get("mu_n")};
    m.gamma = {get("gamma_e"), get("gamma_n")};
    m.sigma = {get("sigma_e"), get("sigma_n")};
    m.anchor = make_geo_point(get("anchor_lat"), get("anchor_lon"));
    m.anchor_t = get("anchor_t");
    m.v0 = {get("v0_e"), get("v0_n")};
    if (!(m.gamma.east > 0.0 && m.gamma.north > 0.0)) throw InputError("OU model: gamma must be > 0");
    if (!(m.sigma.east > 0.0 && m.sigma.north > 0.0)) throw InputError("OU model: sigma must be > 0");
    return m;
}

}  // namespace ucimon
