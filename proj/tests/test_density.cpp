#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "support.hpp"
#include "ucimon/density.hpp"
#include "ucimon/errors.hpp"

using namespace ucimon;

namespace {

/// Quadratic reference: core points from the full distance matrix, clusters
/// as connected components of cores numbered by their first core in
/// (lat, lon, index) order, border points to the lowest-numbered cluster
/// among their core neighbours.
std::vector<int> reference_dbscan(const std::vector<GeoPoint>& pts, double eps, std::size_t min_pts) {
    const std::size_t n = pts.size();
    std::vector<std::vector<char>> near(n, std::vector<char>(n, 0));
    std::vector<char> core(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t cnt = 0;
        for (std::size_t j = 0; j < n; ++j) {
            near[i][j] = geodesic_distance(pts[i], pts[j]) <= eps;
            cnt += near[i][j];
        }
        core[i] = cnt >= min_pts;
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (core[i] && core[j] && near[i][j]) parent[find(i)] = find(j);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(pts[a].lat, pts[a].lon, a) < std::tie(pts[b].lat, pts[b].lon, b);
    });
    std::vector<int> comp_label(n, -1);
    int next = 0;
    for (std::size_t i : order)
        if (core[i] && comp_label[find(i)] < 0) comp_label[find(i)] = next++;

    std::vector<int> label(n, kNoise);
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) {
            label[i] = comp_label[find(i)];
            continue;
        }
        for (std::size_t j = 0; j < n; ++j)
            if (core[j] && near[i][j] && (label[i] == kNoise || comp_label[find(j)] < label[i]))
                label[i] = comp_label[find(j)];
    }
    return label;
}

std::vector<GeoPoint> random_blobs(Rng& rng, std::size_t n) {
    std::vector<GeoPoint> centers;
    const std::size_t k = 1 + rng.below(5);
    for (std::size_t i = 0; i < k; ++i) centers.push_back({rng.uniform(54.0, 54.2), rng.uniform(15.0, 15.3)});
    std::vector<GeoPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.uniform() < 0.2) {
            pts.push_back({rng.uniform(54.0, 54.2), rng.uniform(15.0, 15.3)});
        } else {
            const auto& c = centers[rng.below(k)];
            pts.push_back(destination(c, rng.uniform(0, 360), std::fabs(rng.normal()) * 800.0));
        }
        if (i > 0 && rng.uniform() < 0.05) pts.back() = pts[rng.below(i)];  // exact duplicates
    }
    return pts;
}

}  // namespace

TEST_CASE("DBSCAN agrees with the quadratic reference") {
    Rng rng(51);
    for (int trial = 0; trial < 60; ++trial) {
        const auto pts = random_blobs(rng, 1 + rng.below(200));
        const double eps = rng.uniform(100.0, 1500.0);
        const std::size_t min_pts = 1 + rng.below(8);
        CHECK(dbscan(pts, eps, min_pts) == reference_dbscan(pts, eps, min_pts));
    }
    CHECK(dbscan(std::vector<GeoPoint>{}, 10.0, 1).empty());
    CHECK_THROWS_AS(dbscan(std::vector<GeoPoint>{{0, 0}}, 0.0, 1), InputError);
    CHECK_THROWS_AS(dbscan(std::vector<GeoPoint>{{0, 0}}, 1.0, 0), InputError);
}

TEST_CASE("DBSCAN labels do not depend on input order") {
    Rng rng(52);
    for (int trial = 0; trial < 30; ++trial) {
        auto pts = random_blobs(rng, 80);
        // distinct points so that the canonical order is a pure function of the set
        for (std::size_t i = 0; i < pts.size(); ++i) pts[i].lon += 1e-9 * static_cast<double>(i);
        const auto a = dbscan(pts, 600.0, 4);
        std::vector<std::size_t> perm(pts.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
        std::vector<GeoPoint> shuffled;
        for (auto i : perm) shuffled.push_back(pts[i]);
        const auto b = dbscan(shuffled, 600.0, 4);
        for (std::size_t k = 0; k < perm.size(); ++k) CHECK(b[k] == a[perm[k]]);
    }
}

TEST_CASE("density conserves in-interval dwell and bounds the stationary grid") {
    Rng rng(53);
    const GridSpec grid({44.0, -5.0, 65.0, 36.0}, 0.05);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Track> fleet;
        for (int v = 0; v < 6; ++v) fleet.push_back(test::random_track(rng, 1 + v, {54.5, 15.5}, 0, 60, 2400));
        for (const auto& tr : fleet)
            for (const auto& pt : tr.points) REQUIRE(grid.cell_of(pt.pos).has_value());
        DensityParams p;
        p.interval = {rng.uniform(0.0, 20'000.0), rng.uniform(40'000.0, 80'000.0)};
        p.max_gap_s = 1800.0;
        double expected = 0.0;
        for (const auto& tr : fleet)
            for (std::size_t i = 0; i + 1 < tr.points.size(); ++i) {
                const auto& a = tr.points[i];
                const auto& b = tr.points[i + 1];
                if (static_cast<double>(b.t - a.t) > p.max_gap_s) continue;
                const double lo = std::max<double>(static_cast<double>(a.t), p.interval.start);
                const double hi = std::min<double>(static_cast<double>(b.t), p.interval.end);
                if (hi > lo) expected += (hi - lo) / 3600.0;
            }
        const auto traffic = build_density(fleet, grid, p);
        CHECK(traffic.total() == doctest::Approx(expected).epsilon(1e-9));
        p.mode = DensityMode::stationary;
        const auto still = build_density(fleet, grid, p);
        for (std::size_t i = 0; i < traffic.weights().size(); ++i) CHECK(still.weights()[i] <= traffic.weights()[i]);
    }
}

TEST_CASE("a moored vessel fills one cell") {
    const GridSpec grid({54.0, 15.0, 55.0, 16.0}, 0.1);
    Track tr{1, {test::fix(1, 0, 54.55, 15.55, 0.1), test::fix(1, 7200, 54.55, 15.55, 0.1)}, {}};
    DensityParams p;
    p.interval = {0, 7200};
    const auto g = build_density(std::vector<Track>{tr}, grid, p);
    CHECK(g.at(*grid.cell_of({54.55, 15.55})) == doctest::Approx(2.0));
    CHECK(g.total() == doctest::Approx(2.0));
    p.interval = {3600, 3600};
    CHECK_THROWS_AS(build_density(std::vector<Track>{tr}, grid, p), InputError);
}

TEST_CASE("normalcy is the empirical quantile among visited cells") {
    DensityGrid g(GridSpec({0.0, 0.0, 1.0, 1.0}, 0.25));
    const double w[] = {0, 1, 2, 2, 5, 0, 0, 3};
    for (std::size_t i = 0; i < 8; ++i) g.at({i / 4, i % 4}) = w[i];
    const auto at = [&](std::size_t r, std::size_t c) { return normalcy_score(g, g.spec().cell_center({r, c})); };
    CHECK(at(0, 0) == 0.0);
    CHECK(at(0, 1) == doctest::Approx(1.0 / 5));
    CHECK(at(0, 2) == doctest::Approx(3.0 / 5));
    CHECK(at(1, 0) == doctest::Approx(1.0));
    CHECK(at(1, 3) == doctest::Approx(4.0 / 5));
    CHECK_THROWS_AS(normalcy_score(g, {2.0, 0.5}), InputError);
}

TEST_CASE("density CSV round trip") {
    DensityGrid g(GridSpec({54.0, 15.0, 55.0, 16.0}, 0.1));
    Rng rng(54);
    for (int i = 0; i < 30; ++i) g.at({rng.below(10), rng.below(10)}) = rng.uniform(0.0, 10.0);
    const auto dir = test::temp_dir("density");
    write_density_csv(g, dir / "d.csv", "# header\n");
    const auto back = read_density_csv(dir / "d.csv");
    CHECK(back.spec() == g.spec());
    for (std::size_t i = 0; i < g.weights().size(); ++i) CHECK(back.weights()[i] == g.weights()[i]);
}

TEST_CASE("stationary areas sum member hold times") {
    std::vector<AisPoint> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(test::fix(1, i * 300, 54.5, 15.5 + 1e-5 * i, 0.5));
    for (int i = 0; i < 4; ++i) pts.push_back(test::fix(2, i * 1200, 54.5001, 15.5, 0.2));
    pts.push_back(test::fix(3, 0, 10.0, 10.0, 0.1));
    const auto areas = cluster_stationary(pts, 200.0, 3);
    REQUIRE(areas.size() == 1);
    CHECK(areas[0].member_points.size() == 14);
    // vessel 1: ten holds of 300 s; vessel 2: four holds capped at 600 s
    CHECK(areas[0].dwell_weight == doctest::Approx((10 * 300.0 + 4 * 600.0) / 3600.0));
    CHECK(geodesic_distance(areas[0].centroid, {54.5, 15.5}) < 100.0);
}
