#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/geo.hpp"

using namespace ucimon;

namespace {

// Chord-length formula on unit vectors, independent of the haversine form.
double chord_distance(GeoPoint a, GeoPoint b) {
    const auto vec = [](GeoPoint p) {
        const double la = deg2rad(p.lat), lo = deg2rad(p.lon);
        return std::array<double, 3>{std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
    };
    const auto u = vec(a), v = vec(b);
    const double c = std::sqrt((u[0] - v[0]) * (u[0] - v[0]) + (u[1] - v[1]) * (u[1] - v[1]) +
                               (u[2] - v[2]) * (u[2] - v[2]));
    return 2.0 * kEarthRadiusM * std::asin(c / 2.0);
}

GeoPoint random_point(Rng& rng, double lat_span = 80.0) {
    return {rng.uniform(-lat_span, lat_span), rng.uniform(-180.0, 180.0)};
}

}  // namespace

TEST_CASE("geodesic distance agrees with the chord formula") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const GeoPoint a = random_point(rng), b = random_point(rng);
        const double d = geodesic_distance(a, b);
        CHECK(d == doctest::Approx(chord_distance(a, b)).epsilon(1e-9));
        CHECK(d == doctest::Approx(geodesic_distance(b, a)).epsilon(1e-12));
    }
    // one degree of latitude on the sphere
    CHECK(geodesic_distance({10.0, 20.0}, {11.0, 20.0}) == doctest::Approx(kEarthRadiusM * kPi / 180.0));
    CHECK(geodesic_distance({55.0, 15.0}, {55.0, 15.0}) == 0.0);
}

TEST_CASE("destination inverts distance and bearing") {
    Rng rng(12);
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint o = random_point(rng, 70.0);
        const double brg = rng.uniform(0.0, 360.0);
        const double d = rng.uniform(1.0, 500'000.0);
        const GeoPoint p = destination(o, brg, d);
        CHECK(geodesic_distance(o, p) == doctest::Approx(d).epsilon(1e-8));
        double diff = std::fabs(initial_bearing(o, p) - brg);
        diff = std::min(diff, 360.0 - diff);
        CHECK(diff < 1e-6);
    }
}

TEST_CASE("intermediate point lies on the great circle") {
    Rng rng(13);
    for (int i = 0; i < 500; ++i) {
        const GeoPoint a = random_point(rng, 60.0);
        const GeoPoint b = destination(a, rng.uniform(0.0, 360.0), rng.uniform(100.0, 2'000'000.0));
        const double f = rng.uniform();
        const GeoPoint m = intermediate_point(a, b, f);
        const double ab = geodesic_distance(a, b);
        CHECK(geodesic_distance(a, m) == doctest::Approx(f * ab).epsilon(1e-7).scale(1.0));
        CHECK(geodesic_distance(a, m) + geodesic_distance(m, b) == doctest::Approx(ab).epsilon(1e-9));
    }
    const GeoPoint a{54.0, 15.0}, b{55.0, 16.0};
    CHECK(intermediate_point(a, b, 0.0) == a);
    CHECK(geodesic_distance(intermediate_point(a, b, 1.0), b) < 1e-6);
}

TEST_CASE("local frame keeps range from the origin exact and round-trips") {
    Rng rng(14);
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint o = random_point(rng, 75.0);
        const GeoPoint p = destination(o, rng.uniform(0.0, 360.0), rng.uniform(0.0, 200'000.0));
        const LocalFrame f(o);
        const Vec2 v = f.project(p);
        CHECK(norm(v) == doctest::Approx(geodesic_distance(o, p)).epsilon(1e-9).scale(1.0));
        CHECK(geodesic_distance(f.unproject(v), p) < 1e-6);
    }
}

TEST_CASE("distance to polyline matches dense sampling") {
    Rng rng(15);
    for (int i = 0; i < 200; ++i) {
        const GeoPoint start{rng.uniform(-60.0, 60.0), rng.uniform(-170.0, 170.0)};
        std::vector<GeoPoint> v{start};
        const int n = 2 + static_cast<int>(rng.below(4));
        for (int k = 1; k < n; ++k) v.push_back(destination(v.back(), rng.uniform(0.0, 360.0), rng.uniform(2e3, 40e3)));
        const Polyline line(v);
        const GeoPoint q = destination(start, rng.uniform(0.0, 360.0), rng.uniform(0.0, 60e3));

        double best = std::numeric_limits<double>::infinity();
        double step = 0.0;
        for (std::size_t s = 0; s + 1 < v.size(); ++s) {
            constexpr int kSamples = 4000;
            step = std::max(step, geodesic_distance(v[s], v[s + 1]) / kSamples);
            for (int k = 0; k <= kSamples; ++k)
                best = std::min(best, geodesic_distance(q, intermediate_point(v[s], v[s + 1], double(k) / kSamples)));
        }
        const double d = distance_to_polyline(q, line);
        // planar segments in the query-centered frame sit within 0.1 % of the sphere at these ranges
        CHECK(d <= best + 1e-6);
        CHECK(d >= best - step - 1e-3 * best - 1e-6);
    }
}

TEST_CASE("vertex distances are exact") {
    const Polyline line({{54.0, 15.0}, {54.5, 15.5}, {55.0, 15.0}});
    CHECK(distance_to_polyline({54.5, 15.5}, line) < 1e-9);
    CHECK(distance_to_polyline({53.0, 15.0}, line) == doctest::Approx(geodesic_distance({53.0, 15.0}, {54.0, 15.0})));
}

TEST_CASE("polyline and point validation") {
    CHECK_THROWS_AS(Polyline({{1.0, 1.0}}), InputError);
    CHECK_THROWS_AS(Polyline({{1.0, 1.0}, {1.0, 1.0}}), InputError);
    CHECK_THROWS_AS(make_geo_point(91.0, 0.0), InputError);
    CHECK_THROWS_AS(make_geo_point(std::nan(""), 0.0), InputError);
    CHECK(make_geo_point(10.0, 190.0).lon == doctest::Approx(-170.0));
    CHECK(normalize_lon(180.0) == doctest::Approx(-180.0));
    CHECK(normalize_lon(-540.0) == doctest::Approx(-180.0));
}

TEST_CASE("grid cells tile the box") {
    const GridSpec g({54.0, 15.0, 55.0, 16.0}, 0.1);
    CHECK(g.rows() == 10);
    CHECK(g.cols() == 10);
    CHECK(g.cell_of({54.0, 15.0})->row == 0);
    CHECK(g.cell_of({54.95, 15.05})->row == 9);
    CHECK_FALSE(g.cell_of({55.0, 15.5}).has_value());
    CHECK_FALSE(g.cell_of({53.99, 15.5}).has_value());
    Rng rng(16);
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint p{rng.uniform(54.0, 55.0), rng.uniform(15.0, 16.0)};
        const auto c = g.cell_of(p);
        REQUIRE(c);
        const GeoPoint ctr = g.cell_center(*c);
        CHECK(std::fabs(ctr.lat - p.lat) <= 0.05 + 1e-12);
        CHECK(std::fabs(ctr.lon - p.lon) <= 0.05 + 1e-12);
    }
    CHECK_THROWS_AS(GridSpec({54.0, 15.0, 54.0, 16.0}, 0.1), InputError);
    CHECK_THROWS_AS(GridSpec({54.0, 15.0, 55.0, 16.0}, 0.0), InputError);
}
