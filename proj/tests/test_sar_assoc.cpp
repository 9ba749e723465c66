#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "ucimon/assignment.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/pipeline.hpp"
#include "ucimon/sar_assoc.hpp"
#include "ucimon/scenario.hpp"

using namespace ucimon;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Best {
    std::size_t matched = 0;
    double cost = kInf;
};

// Every injective partial map from rows to columns over finite entries; keeps
// the largest cardinality, then the smallest cost summed in row order.
void enumerate(const CostMatrix& m, std::size_t row, std::vector<bool>& used, std::size_t matched, double cost,
               Best& best) {
    if (row == m.rows) {
        if (matched > best.matched || (matched == best.matched && cost < best.cost)) best = {matched, cost};
        return;
    }
    enumerate(m, row + 1, used, matched, cost, best);
    for (std::size_t c = 0; c < m.cols; ++c) {
        if (used[c] || !std::isfinite(m(row, c))) continue;
        used[c] = true;
        enumerate(m, row + 1, used, matched + 1, cost + m(row, c), best);
        used[c] = false;
    }
}

Best brute_force(const CostMatrix& m) {
    std::vector<bool> used(m.cols, false);
    Best best{0, 0.0};
    enumerate(m, 0, used, 0, 0.0, best);
    return best;
}

SarDetection det(std::string id, Timestamp t, GeoPoint p) { return {std::move(id), "img", t, p}; }

}  // namespace

TEST_CASE("assignment solver matches exhaustive enumeration") {
    Rng rng(71);
    for (int trial = 0; trial < 400; ++trial) {
        CostMatrix m(rng.below(8), rng.below(8));
        const double p_forbid = rng.uniform(0.0, 0.7);
        const bool ties = rng.uniform() < 0.3;
        for (auto& c : m.cost) {
            if (rng.uniform() < p_forbid) c = kInf;
            else c = ties ? static_cast<double>(rng.below(4)) : rng.uniform(0.0, 100.0);
        }
        const auto r = solve_assignment(m);
        const auto b = brute_force(m);
        CHECK(r.matched == b.matched);
        CHECK(r.total_cost == b.cost);

        std::vector<bool> used(m.cols, false);
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (!r.row_to_col[i]) continue;
            const auto c = *r.row_to_col[i];
            CHECK_FALSE(used[c]);
            used[c] = true;
            CHECK(std::isfinite(m(i, c)));
            sum += m(i, c);
            ++n;
        }
        CHECK(n == r.matched);
        CHECK(sum == r.total_cost);
    }
}

TEST_CASE("scene association is optimal against brute force") {
    Rng rng(72);
    const Timestamp t_acq = 1'700'000'000;
    for (int trial = 0; trial < 200; ++trial) {
        const GeoPoint center{rng.uniform(-60.0, 60.0), rng.uniform(-170.0, 170.0)};
        std::vector<SarDetection> dets;
        std::vector<Track> tracks;
        const std::size_t nd = rng.below(8), nt = rng.below(8);
        for (std::size_t i = 0; i < nd; ++i)
            dets.push_back(det("d" + std::to_string(i), t_acq, destination(center, rng.uniform(0, 360), rng.uniform(0, 5000))));
        for (std::size_t k = 0; k < nt; ++k) {
            const Mmsi mmsi = 200000000 + static_cast<Mmsi>(k);
            const GeoPoint p = destination(center, rng.uniform(0, 360), rng.uniform(0, 5000));
            Track tr;
            tr.mmsi = tr.info.mmsi = mmsi;
            // a fix exactly at acquisition time, unless the vessel has left already
            const bool present = rng.uniform() < 0.85;
            tr.points.push_back(test::fix(mmsi, t_acq - 300, p.lat, p.lon + 0.01));
            if (present) tr.points.push_back(test::fix(mmsi, t_acq, p.lat, p.lon));
            tr.points.push_back(test::fix(mmsi, present ? t_acq + 300 : t_acq - 100, p.lat, p.lon - 0.01));
            tracks.push_back(tr);
        }
        // shuffled inputs: the sorted order drives the result
        auto shuffled = dets;
        for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
        const auto out = associate(shuffled, tracks, {});

        CostMatrix m(nd, nt);
        for (std::size_t i = 0; i < nd; ++i)
            for (std::size_t k = 0; k < nt; ++k) {
                const auto& pts = tracks[k].points;
                const bool present = pts.size() == 3;
                const double d = geodesic_distance(dets[i].pos, pts[1].pos);
                m(i, k) = present && d < 3000.0 ? d : kInf;
            }
        const auto best = brute_force(m);

        REQUIRE(out.size() == nd);
        std::size_t matched = 0;
        double cost = 0.0;
        for (std::size_t i = 0; i < nd; ++i) {
            CHECK(out[i].detection_id == dets[i].id);
            CHECK(out[i].mmsi.has_value() == out[i].distance_m.has_value());
            if (!out[i].mmsi) continue;
            ++matched;
            cost += *out[i].distance_m;
            CHECK(*out[i].distance_m < 3000.0);
        }
        CHECK(matched == best.matched);
        CHECK(cost == best.cost);
    }
}

TEST_CASE("association gate and interpolation limit are strict thresholds") {
    const GeoPoint a{55.0, 15.0}, b{55.3, 15.0};
    const auto with_gap = [&](Timestamp gap) {
        Track tr;
        tr.mmsi = tr.info.mmsi = 7;
        tr.points = {test::fix(7, 0, a.lat, a.lon), test::fix(7, gap, b.lat, b.lon)};
        return tr;
    };
    const auto run = [&](const Track& tr, double offset_m) {
        const Timestamp t = tr.points.back().t / 2;
        const GeoPoint mid = *interpolate_position(tr, static_cast<double>(t), 1e9);
        std::vector<SarDetection> d{det("x", t, destination(mid, 90.0, offset_m))};
        return associate(d, std::vector<Track>{tr}, {})[0];
    };
    const Track ok = with_gap(5 * 3600 + 59 * 60);
    const auto near = run(ok, 2900.0);
    REQUIRE(near.mmsi.has_value());
    CHECK(*near.distance_m == doctest::Approx(2900.0).epsilon(1e-6));
    CHECK_FALSE(run(ok, 3100.0).mmsi.has_value());
    CHECK_FALSE(run(with_gap(6 * 3600 + 60), 10.0).mmsi.has_value());
}

TEST_CASE("association input checks") {
    std::vector<Track> none;
    std::vector<SarDetection> dup{det("a", 0, {55, 15}), det("a", 0, {55, 15.1})};
    CHECK_THROWS_AS(associate(dup, none, {}), InputError);
    std::vector<SarDetection> mixed{det("a", 0, {55, 15}), det("b", 60, {55, 15.1})};
    CHECK_THROWS_AS(associate(mixed, none, {}), InputError);
    AssociationParams zero;
    zero.gate_km = 0.0;
    CHECK_THROWS_AS(associate(std::vector<SarDetection>{det("a", 0, {55, 15})}, none, zero), InputError);
    CHECK(associate(std::vector<SarDetection>{}, none, {}).empty());
}

TEST_CASE("predictions widen the gate for silent vessels") {
    const Timestamp t_acq = 100'000;
    Track tr;
    tr.mmsi = tr.info.mmsi = 9;
    tr.points = {test::fix(9, t_acq - 20'000, 55.0, 15.0), test::fix(9, t_acq - 10'000, 55.1, 15.0)};
    const GeoPoint guess{55.3, 15.0};
    std::vector<SarDetection> d{det("x", t_acq, destination(guess, 45.0, 6000.0))};
    std::vector<Track> tracks{tr};
    CHECK_FALSE(associate(d, tracks, {})[0].mmsi.has_value());

    std::map<Mmsi, Prediction> preds;
    preds[9] = Prediction{static_cast<double>(t_acq), guess, {}, {}, 7000.0};
    AssociationParams p;
    p.predictions = &preds;
    const auto a = associate(d, tracks, p)[0];
    REQUIRE(a.mmsi == Mmsi{9});
    CHECK(a.used_prediction);
    CHECK(*a.distance_m == doctest::Approx(6000.0).epsilon(1e-6));

    preds[9].radius_3sigma_m = 1000.0;  // the base gate still applies
    CHECK_FALSE(associate(d, tracks, p)[0].mmsi.has_value());
    preds[9].t = t_acq + 1.0;
    CHECK_THROWS_AS(associate(d, tracks, p), InputError);
}

TEST_CASE("report flags detections inside an AIS gap") {
    Track gapped;
    gapped.mmsi = gapped.info.mmsi = 11;
    gapped.points = {test::fix(11, 0, 55.0, 15.0), test::fix(11, 7200, 55.2, 15.0)};
    const Timestamp t = 3600;
    std::vector<SarDetection> d{det("near", t, {55.1, 15.05}), det("far", t, {55.1, 16.0})};
    std::vector<Track> tracks{gapped};
    AssociationParams strict;
    strict.max_gap_s = 3000.0;  // no interpolated position inside the gap
    const auto assoc = associate(d, tracks, strict);
    const auto scene = association_report(d, assoc, tracks);
    REQUIRE(scene.rows.size() == 2);
    CHECK(scene.flagged == 2);
    CHECK(scene.rows[0].detection.id == "far");
    CHECK(scene.rows[0].flag == SceneFlag::unassociated);
    CHECK(scene.rows[1].flag == SceneFlag::gap_bracketing);
    CHECK(scene.rows[1].gap_mmsi == Mmsi{11});
    CHECK(*scene.rows[1].gap_s == 7200.0);

    std::ostringstream csv;
    write_association_csv(csv, scene);
    CHECK(csv.str().rfind("detection_id,mmsi,distance_m,used_prediction,flag\n", 0) == 0);
}

TEST_CASE("detections CSV round trip") {
    std::vector<SarDetection> d{det("a", 1'600'000'000, {55.123456789, 15.5}), det("b", 1'600'000'000, {-10, -170})};
    d[1].image_id = "other";
    std::stringstream s;
    write_detections_csv(s, d);
    const auto back = parse_detections_csv(s);
    CHECK(back.errors.empty());
    REQUIRE(back.detections.size() == 2);
    CHECK(back.detections[0].pos == d[0].pos);
    CHECK(back.detections[1].image_id == "other");
    CHECK(group_by_image(back.detections).size() == 2);
}

TEST_CASE("Baltic scene associations match the stored reference") {
    const auto sc = baltic_scenario(0);
    RunConfig cfg;
    const auto scenes = associate_scenes(cfg, sc.tracks, sc.detections);
    std::ostringstream got;
    bool first = true;
    for (const auto& s : scenes) {
        write_association_csv(got, s.scene, first);
        first = false;
    }
    const auto golden = test::read_file(std::filesystem::path(UCIMON_TEST_DATA) / "baltic_associations.csv");
    CHECK(got.str() == golden);
}
