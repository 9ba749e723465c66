#include <cmath>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/ou.hpp"
#include "ucimon/scenario.hpp"

using namespace ucimon;

namespace {

struct Sample {
    double mean_x = 0, mean_v = 0, var_x = 0, var_v = 0, cov = 0;
};

// Exact AR(1) velocity steps with trapezoidal position integration on a fine
// grid. Independent of the closed-form integrated moments.
Sample monte_carlo(double mu, double gamma, double sigma, double v0, double horizon, int paths, Rng& rng) {
    constexpr int kSteps = 400;
    const double h = horizon / kSteps;
    const double a = std::exp(-gamma * h);
    const double sd = sigma * std::sqrt((1.0 - a * a) / (2.0 * gamma));
    std::vector<double> xs(static_cast<std::size_t>(paths)), vs(static_cast<std::size_t>(paths));
    for (int p = 0; p < paths; ++p) {
        double x = 0.0, v = v0;
        for (int k = 0; k < kSteps; ++k) {
            const double vn = mu + a * (v - mu) + sd * rng.normal();
            x += 0.5 * h * (v + vn);
            v = vn;
        }
        xs[static_cast<std::size_t>(p)] = x;
        vs[static_cast<std::size_t>(p)] = v;
    }
    Sample s;
    for (int p = 0; p < paths; ++p) {
        s.mean_x += xs[static_cast<std::size_t>(p)];
        s.mean_v += vs[static_cast<std::size_t>(p)];
    }
    s.mean_x /= paths;
    s.mean_v /= paths;
    for (int p = 0; p < paths; ++p) {
        const double dx = xs[static_cast<std::size_t>(p)] - s.mean_x, dv = vs[static_cast<std::size_t>(p)] - s.mean_v;
        s.var_x += dx * dx;
        s.var_v += dv * dv;
        s.cov += dx * dv;
    }
    s.var_x /= paths - 1;
    s.var_v /= paths - 1;
    s.cov /= paths - 1;
    return s;
}

Track track_from_plane(const std::vector<OuSample>& path, GeoPoint origin, Mmsi mmsi = 1) {
    const LocalFrame f(origin);
    Track tr;
    tr.mmsi = tr.info.mmsi = mmsi;
    for (const auto& s : path) {
        const GeoPoint p = f.unproject(s.pos);
        tr.points.push_back(test::fix(mmsi, static_cast<Timestamp>(std::llround(s.t)), p.lat, p.lon, 5.0, 0.0));
    }
    return tr;
}

}  // namespace

TEST_CASE("closed-form moments agree with a fine-step Monte Carlo") {
    Rng rng(61);
    const double mu = 0.8, gamma = 1.0 / 3600.0, sigma = 0.02, v0 = -0.5;
    const int paths = 20000;
    for (double horizon : {600.0, 10800.0}) {
        const auto m = ou_moments(mu, gamma, sigma, v0, horizon);
        const auto s = monte_carlo(mu, gamma, sigma, v0, horizon, paths, rng);
        const double n = paths;
        CHECK(std::fabs(s.mean_x - m.mean_pos) < 4.0 * std::sqrt(m.var_pos / n));
        CHECK(std::fabs(s.mean_v - m.mean_vel) < 4.0 * std::sqrt(m.var_vel / n));
        CHECK(std::fabs(s.var_x - m.var_pos) < 4.0 * m.var_pos * std::sqrt(2.0 / n));
        CHECK(std::fabs(s.var_v - m.var_vel) < 4.0 * m.var_vel * std::sqrt(2.0 / n));
        const double cov_se = std::sqrt((m.var_pos * m.var_vel + m.cov_pos_vel * m.cov_pos_vel) / n);
        CHECK(std::fabs(s.cov - m.cov_pos_vel) < 4.0 * cov_se);
    }
}

TEST_CASE("moment limits") {
    // Brownian velocity limit
    for (double dt : {1.0, 100.0, 1e4}) {
        const double gamma = 1e-3 / dt;
        const auto m = ou_moments(0.0, gamma, 0.05, 0.0, dt);
        CHECK(m.var_pos == doctest::Approx(0.05 * 0.05 * dt * dt * dt / 3.0).epsilon(0.01));
        CHECK(m.var_vel == doctest::Approx(0.05 * 0.05 * dt).epsilon(0.01));
    }
    // long horizons forget v0 and the velocity variance saturates
    const auto far = ou_moments(1.0, 0.01, 0.1, 5.0, 1e5);
    CHECK(far.mean_vel == doctest::Approx(1.0));
    CHECK(far.var_vel == doctest::Approx(0.1 * 0.1 / (2 * 0.01)));
    CHECK(far.mean_pos == doctest::Approx(1e5 + 4.0 / 0.01));
    // the series and closed branches meet at x = 1
    const auto lo = ou_moments(0, 1.0 - 1e-12, 1.0, 0, 1.0), hi = ou_moments(0, 1.0 + 1e-12, 1.0, 0, 1.0);
    CHECK(lo.var_pos == doctest::Approx(hi.var_pos).epsilon(1e-9));
    const auto zero = ou_moments(1.0, 0.01, 0.1, 2.0, 0.0);
    CHECK(zero.mean_pos == 0.0);
    CHECK(zero.var_pos == 0.0);
    CHECK(zero.mean_vel == 2.0);
}

TEST_CASE("prediction at the anchor time is the anchor") {
    OuModel m;
    m.mu = {1.0, 0.5};
    m.gamma = {1e-4, 2e-4};
    m.sigma = {0.01, 0.02};
    m.anchor = {40.6, 19.0};
    m.anchor_t = 1'000'000;
    m.v0 = {0.3, -0.2};
    const auto p = predict(m, m.anchor_t);
    CHECK(p.mean_pos == m.anchor);
    CHECK(p.radius_3sigma_m == 0.0);
    CHECK_THROWS_AS(predict(m, m.anchor_t - 1), InputError);
    const auto q = predict(m, m.anchor_t + 3600);
    CHECK(q.radius_3sigma_m == doctest::Approx(3.0 * std::sqrt(std::max(q.cov.ee, q.cov.nn))));

    std::stringstream s;
    save_ou_model(s, m);
    CHECK(load_ou_model(s) == m);
    std::stringstream bad("mu_e=1\n");
    CHECK_THROWS_AS(load_ou_model(bad), InputError);
}

TEST_CASE("fit recovers simulated parameters") {
    Rng rng(62);
    const Vec2 mu{0.2, 0.3}, gamma{2.5e-3, 2.5e-3}, sigma{0.02, 0.03};
    const OuSample start{0.0, {0.0, 0.0}, mu};
    const auto path = simulate_ou(mu, gamma, sigma, start, 120.0, 4000, rng);
    const Track tr = track_from_plane(path, {0.0, 10.0});
    const auto m = fit_ou(tr, {0.0, path.back().t});
    CHECK(m.gamma.east == doctest::Approx(gamma.east).epsilon(0.2));
    CHECK(m.gamma.north == doctest::Approx(gamma.north).epsilon(0.2));
    CHECK(m.sigma.east == doctest::Approx(sigma.east).epsilon(0.1));
    CHECK(m.sigma.north == doctest::Approx(sigma.north).epsilon(0.1));
    CHECK(norm(m.mu - mu) < 0.2 * norm(mu));
    CHECK(m.anchor == tr.points.back().pos);
    CHECK(m.anchor_t == static_cast<double>(tr.points.back().t));
}

TEST_CASE("fit edge cases") {
    // constant velocity: the zero-noise limit
    const Track line = test::straight_track(1, {40.0, 18.0}, 45.0, 10.0, 0, 30, 60);
    const auto m = fit_ou(line, {0, 1e9});
    CHECK(m.gamma.east == kGammaMin);
    CHECK(m.sigma.north == kSigmaFloor);
    CHECK(norm(m.mu) == doctest::Approx(10.0 * kKnotToMps).epsilon(1e-3));

    Track still = line;
    for (auto& p : still.points) p.pos = line.points.front().pos;
    CHECK_THROWS_AS(fit_ou(still, {0, 1e9}), InsufficientData);
    CHECK_THROWS_AS(fit_ou(line, {0, 500}), InsufficientData);  // 9 fixes
}
