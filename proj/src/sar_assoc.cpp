#include "ucimon/sar_assoc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include "ucimon/assignment.hpp"
#include "ucimon/csv.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/kinematics.hpp"

namespace ucimon {

DetectionParseResult parse_detections_csv(std::istream& in) {
    DetectionParseResult res;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::is_skippable(line)) continue;
        if (!header) {
            if (csv::trim(line) != kDetectionHeader)
                throw InputError("unexpected detections header: '" + csv::trim(line) + "'");
            header = true;
            continue;
        }
        const auto f = csv::split(line);
        const auto bad = [&](RecordErrorKind k, std::string field, std::string msg) {
            res.errors.push_back(RecordError{line_no, k, std::move(field), std::move(msg)});
        };
        if (f.size() != 5) {
            bad(RecordErrorKind::format, "row", "expected 5 fields");
            continue;
        }
        SarDetection d;
        d.id = csv::trim(f[0]);
        d.image_id = csv::trim(f[1]);
        if (d.id.empty()) {
            bad(RecordErrorKind::format, "id", "empty");
            continue;
        }
        const auto t = parse_iso8601(f[2]);
        if (!t) {
            bad(RecordErrorKind::format, "timestamp", "not ISO-8601 UTC");
            continue;
        }
        d.t_acq = *t;
        const auto lat = csv::parse_double(f[3]), lon = csv::parse_double(f[4]);
        if (!lat || !lon) {
            bad(RecordErrorKind::format, lat ? "lon" : "lat", "not a number");
            continue;
        }
        if (*lat < -90.0 || *lat > 90.0) {
            bad(RecordErrorKind::range, "lat", "outside [-90, 90]");
            continue;
        }
        if (*lon < -180.0 || *lon > 180.0) {
            bad(RecordErrorKind::range, "lon", "outside [-180, 180]");
            continue;
        }
        d.pos = {*lat, normalize_lon(*lon)};
        res.detections.push_back(std::move(d));
    }
    if (!header) throw InputError("detections file has no header");
    return res;
}

DetectionParseResult parse_detections_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path.string());
    return parse_detections_csv(in);
}

void write_detections_csv(std::ostream& out, std::span<const SarDetection> detections) {
    out << kDetectionHeader << '\n';
    for (const auto& d : detections)
        out << csv::escape(d.id) << ',' << csv::escape(d.image_id) << ',' << format_iso8601(d.t_acq) << ','
            << csv::format_double(d.pos.lat) << ',' << csv::format_double(d.pos.lon) << '\n';
}

std::map<std::string, std::vector<SarDetection>> group_by_image(std::span<const SarDetection> detections) {
    std::map<std::string, std::vector<SarDetection>> out;
    for (const auto& d : detections) out[d.image_id].push_back(d);
    return out;
}

std::vector<Association> associate(std::span<const SarDetection> detections, std::span<const Track> tracks,
                                   const AssociationParams& params) {
    if (!(params.gate_km > 0.0)) throw InputError("associate: gate must be > 0");
    if (detections.empty()) return {};
    std::vector<const SarDetection*> dets;
    for (const auto& d : detections) dets.push_back(&d);
    std::sort(dets.begin(), dets.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < dets.size(); ++i)
        if (dets[i]->id == dets[i - 1]->id) throw InputError("associate: duplicate detection id '" + dets[i]->id + "'");
    const Timestamp t_acq = dets.front()->t_acq;
    for (const auto* d : dets)
        if (d->t_acq != t_acq) throw InputError("associate: detections of one scene must share the acquisition time");

    std::vector<const Track*> trs;
    for (const auto& t : tracks)
        if (!t.points.empty()) trs.push_back(&t);
    std::sort(trs.begin(), trs.end(), [](const auto* a, const auto* b) { return a->mmsi < b->mmsi; });

    // position of each track at t_acq, and whether it came from a prediction
    struct Anchor {
        std::optional<GeoPoint> pos;
        bool predicted = false;
        double gate_m = 0.0;
    };
    const double gate_m = params.gate_km * 1000.0;
    std::vector<Anchor> anchors(trs.size());
    for (std::size_t k = 0; k < trs.size(); ++k) {
        anchors[k].gate_m = gate_m;
        anchors[k].pos = interpolate_position(*trs[k], static_cast<double>(t_acq), params.max_gap_s);
        if (!anchors[k].pos && params.predictions) {
            auto it = params.predictions->find(trs[k]->mmsi);
            if (it != params.predictions->end()) {
                if (it->second.t != static_cast<double>(t_acq))
                    throw InputError("associate: prediction time does not match the acquisition time");
                anchors[k].pos = it->second.mean_pos;
                anchors[k].predicted = true;
                anchors[k].gate_m = std::max(gate_m, it->second.radius_3sigma_m);
            }
        }
    }

    CostMatrix cm(dets.size(), trs.size());
    for (std::size_t i = 0; i < dets.size(); ++i)
        for (std::size_t k = 0; k < trs.size(); ++k) {
            if (!anchors[k].pos) continue;
            const double d = geodesic_distance(dets[i]->pos, *anchors[k].pos);
            if (d < anchors[k].gate_m) cm(i, k) = d;
        }
    const AssignmentResult sol = solve_assignment(cm);

    std::vector<Association> out;
    out.reserve(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        Association a;
        a.detection_id = dets[i]->id;
        if (const auto k = sol.row_to_col[i]) {
            a.mmsi = trs[*k]->mmsi;
            a.distance_m = cm(i, *k);
            a.used_prediction = anchors[*k].predicted;
            a.track_pos = anchors[*k].pos;
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::string_view to_string(SceneFlag f) {
    switch (f) {
        case SceneFlag::ok: return "ok";
        case SceneFlag::unassociated: return "unassociated";
        case SceneFlag::gap_bracketing: return "gap_bracketing";
    }
    return "ok";
}

AnnotatedScene association_report(std::span<const SarDetection> detections, std::span<const Association> assocs,
                                   std::span<const Track> tracks, const ReportParams& params) {
    std::map<std::string, const Association*> by_id;
    for (const auto& a : assocs) by_id[a.detection_id] = &a;

    std::vector<const SarDetection*> dets;
    for (const auto& d : detections) dets.push_back(&d);
    std::sort(dets.begin(), dets.end(), [](const auto* a, const auto* b) { return a->id < b->id; });

    AnnotatedScene scene;
    for (const auto* d : dets) {
        SceneRow row;
        row.detection = *d;
        auto it = by_id.find(d->id);
        if (it == by_id.end()) throw InputError("association_report: no association for detection '" + d->id + "'");
        row.association = *it->second;
        if (row.association.mmsi) {
            if (row.association.track_pos) row.offset = LocalFrame(*row.association.track_pos).project(d->pos);
            scene.rows.push_back(std::move(row));
            continue;
        }

        row.flag = SceneFlag::unassociated;
        ++scene.flagged;
        const double t = static_cast<double>(d->t_acq);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& tr : tracks) {
            const auto& pts = tr.points;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                if (!(static_cast<double>(pts[i].t) < t && t < static_cast<double>(pts[i + 1].t))) continue;
                const auto span = static_cast<double>(pts[i + 1].t - pts[i].t);
                if (span < params.gap_flag_s) break;
                const double dist = pts[i].pos == pts[i + 1].pos
                                        ? geodesic_distance(d->pos, pts[i].pos)
                                        : distance_to_polyline(d->pos, Polyline({pts[i].pos, pts[i + 1].pos}));
                if (dist <= params.near_km * 1000.0 && dist < best) {
                    best = dist;
                    row.flag = SceneFlag::gap_bracketing;
                    row.gap_mmsi = tr.mmsi;
                    row.gap_s = span;
                }
                break;
            }
        }
        scene.rows.push_back(std::move(row));
    }
    return scene;
}

void write_association_csv(std::ostream& out, const AnnotatedScene& scene, bool with_header) {
    if (with_header) out << "detection_id,mmsi,distance_m,used_prediction,flag\n";
    for (const auto& r : scene.rows) {
        out << csv::escape(r.detection.id) << ',';
        if (r.association.mmsi) out << *r.association.mmsi;
        out << ',';
        if (r.association.distance_m) out << csv::format_double(*r.association.distance_m);
        out << ',' << (r.association.used_prediction ? "true" : "false") << ',' << to_string(r.flag) << '\n';
    }
}

}  // namespace ucimon
