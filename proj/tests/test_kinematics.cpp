#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/kinematics.hpp"

using namespace ucimon;

TEST_CASE("course difference is the smaller arc") {
    CHECK(course_difference(10, 350) == doctest::Approx(20));
    CHECK(course_difference(350, 10) == doctest::Approx(20));
    CHECK(course_difference(0, 180) == doctest::Approx(180));
    CHECK(course_difference(90, 90) == 0.0);
    Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const double a = rng.uniform(0, 360), b = rng.uniform(0, 360);
        const double d = course_difference(a, b);
        CHECK(d >= 0.0);
        CHECK(d <= 180.0);
        CHECK(d == doctest::Approx(course_difference(b, a)));
    }
}

TEST_CASE("interpolation hits fixes and splits segments in proportion to time") {
    Rng rng(32);
    for (int trial = 0; trial < 50; ++trial) {
        const Track tr = test::random_track(rng, 7, {55.0, 15.0}, 1'600'000'000, 40);
        for (const auto& p : tr.points) CHECK(*interpolate_position(tr, static_cast<double>(p.t), 1e9) == p.pos);
        for (int k = 0; k < 20; ++k) {
            const std::size_t i = rng.below(tr.points.size() - 1);
            const auto& a = tr.points[i];
            const auto& b = tr.points[i + 1];
            const double f = rng.uniform();
            const double t = static_cast<double>(a.t) + f * static_cast<double>(b.t - a.t);
            const auto q = interpolate_position(tr, t, 1e9);
            REQUIRE(q);
            const double ab = geodesic_distance(a.pos, b.pos);
            CHECK(geodesic_distance(a.pos, *q) == doctest::Approx(f * ab).epsilon(1e-6).scale(1.0));
        }
        CHECK_FALSE(interpolate_position(tr, static_cast<double>(tr.points.front().t) - 1, 1e9));
        CHECK_FALSE(interpolate_position(tr, static_cast<double>(tr.points.back().t) + 1, 1e9));
    }
}

TEST_CASE("interpolation refuses spacings longer than the gap limit") {
    const Track tr{1, {test::fix(1, 0, 55, 15), test::fix(1, 21'540, 55.1, 15), test::fix(1, 21'540 + 21'660, 55.2, 15)}, {}};
    CHECK(interpolate_position(tr, 10'000, 21'600).has_value());            // 5 h 59 m
    CHECK_FALSE(interpolate_position(tr, 30'000, 21'600).has_value());      // 6 h 01 m
    CHECK(interpolate_position(tr, 21'540 + 21'660, 21'600).has_value());  // on a fix
    CHECK_THROWS_AS(interpolate_position(Track{}, 0, 10), InputError);
    CHECK_THROWS_AS(interpolate_position(tr, 0, 0), InputError);
}

TEST_CASE("gaps are spacings strictly longer than the minimum") {
    const Track tr{1, {test::fix(1, 0, 55, 15), test::fix(1, 100, 55, 15), test::fix(1, 250, 55, 15)}, {}};
    const auto g = find_gaps(tr, 100);
    REQUIRE(g.size() == 1);
    CHECK(g[0].t_start == 100);
    CHECK(g[0].duration == 150);
}

TEST_CASE("kinematic statistics match a one-second sampling oracle") {
    Rng rng(33);
    for (int trial = 0; trial < 60; ++trial) {
        Track tr = test::random_track(rng, 9, {55.0, 15.0}, 1'000'000, 30, 300);
        const double t0 = static_cast<double>(tr.points.front().t), t1 = static_cast<double>(tr.points.back().t);
        const double a = std::floor(rng.uniform(t0 - 100, t1));
        const double b = std::floor(rng.uniform(a + 1, t1 + 100));
        const TimeWindow w{a, b};
        bool any = false;
        for (const auto& p : tr.points) any = any || w.contains(static_cast<double>(p.t));
        if (!any) {
            CHECK_THROWS_AS(compute_stats(tr, w, 3.0, 30.0), InsufficientData);
            continue;
        }
        const auto st = compute_stats(tr, w, 3.0, 30.0);

        // sample-and-hold oracle on whole seconds (all times are integers)
        double n = 0, sog = 0, drift = 0;
        std::size_t idx = 0;
        for (double t = std::max(a, t0); t < std::min(b, t1); t += 1.0) {
            while (idx + 1 < tr.points.size() && static_cast<double>(tr.points[idx + 1].t) <= t) ++idx;
            n += 1;
            sog += tr.points[idx].sog;
            drift += tr.points[idx].sog < 3.0 ? 1 : 0;
        }
        std::size_t turns = 0;
        for (std::size_t i = 0; i + 1 < tr.points.size(); ++i)
            if (w.contains(static_cast<double>(tr.points[i].t)) && w.contains(static_cast<double>(tr.points[i + 1].t)) &&
                course_difference(tr.points[i].cog, tr.points[i + 1].cog) > 30.0)
                ++turns;
        CHECK(st.duration_s == doctest::Approx(n));
        if (n > 0) {
            CHECK(st.mean_sog == doctest::Approx(sog / n));
            CHECK(st.drift_fraction == doctest::Approx(drift / n));
            CHECK(st.manoeuvre_rate == doctest::Approx(static_cast<double>(turns) / (n / 60.0)));
        }
    }
}
