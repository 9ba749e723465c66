#include "ucimon/evidential.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ucimon/csv.hpp"

namespace ucimon {

Frame::Frame(std::vector<std::string> elements) : elements_(std::move(elements)) {
    if (elements_.size() < 2) throw InputError("frame needs at least 2 elements");
    if (elements_.size() > kMaxFrameSize) throw InputError("frame has more than 16 elements");
    std::set<std::string> seen;
    for (const auto& e : elements_) {
        if (e.empty()) throw InputError("frame element is empty");
        if (!seen.insert(e).second) throw InputError("frame element '" + e + "' repeated");
    }
}

std::optional<std::size_t> Frame::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < elements_.size(); ++i)
        if (elements_[i] == name) return i;
    return std::nullopt;
}

Subset Frame::singleton(std::string_view name) const {
    const auto i = index_of(name);
    if (!i) throw InputError("'" + std::string(name) + "' is not an element of the frame");
    return Subset{1} << *i;
}

Subset Frame::subset(std::initializer_list<std::string_view> names) const {
    Subset s = 0;
    for (auto n : names) s |= singleton(n);
    return s;
}

std::string Frame::describe(Subset s) const {
    std::string out = "{";
    bool first = true;
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (!(s & (Subset{1} << i))) continue;
        if (!first) out += ',';
        out += elements_[i];
        first = false;
    }
    return out + "}";
}

Frame threat_frame() { return Frame{"benign", "suspicious", "threat"}; }

Frame consistency_frame() { return Frame{"consistent", "inconsistent"}; }

MassFunction MassFunction::vacuous(const Frame& frame) { return MassFunction(frame, {{frame.full(), 1.0}}); }

MassFunction::MassFunction(Frame frame, std::map<Subset, double> masses) : frame_(std::move(frame)) {
    double total = 0.0;
    for (const auto& [s, v] : masses) {
        if (!std::isfinite(v) || v < 0.0) throw InputError("mass must be a finite non-negative number");
        if (v == 0.0) continue;
        if (s == 0) throw InputError("mass on the empty set");
        if ((s & ~frame_.full()) != 0) throw InputError("focal set outside the frame");
        masses_.emplace(s, v);
        total += v;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw InputError("masses sum to " + csv::format_double(total) + ", not 1");
}

double MassFunction::mass(Subset a) const {
    const auto it = masses_.find(a);
    return it == masses_.end() ? 0.0 : it->second;
}

double MassFunction::belief(Subset a) const {
    double b = 0.0;
    for (const auto& [s, v] : masses_)
        if ((s & ~a) == 0) b += v;
    return b;
}

double MassFunction::plausibility(Subset a) const {
    double p = 0.0;
    for (const auto& [s, v] : masses_)
        if ((s & a) != 0) p += v;
    return p;
}

bool MassFunction::is_vacuous() const { return masses_.size() == 1 && masses_.begin()->first == frame_.full(); }

MassFunction discount(const MassFunction& m, double reliability) {
    if (!(reliability >= 0.0 && reliability <= 1.0)) throw InputError("reliability must lie in [0, 1]");
    const Subset full = m.frame().full();
    std::map<Subset, double> out;
    for (const auto& [s, v] : m.focal()) out[s] += reliability * v;
    out[full] += 1.0 - reliability;
    return MassFunction(m.frame(), std::move(out));
}

Combination combine_dempster(const MassFunction& m1, const MassFunction& m2) {
    if (!(m1.frame() == m2.frame())) throw InputError("cannot combine mass functions on different frames");
    std::map<Subset, double> joint;
    double conflict = 0.0;
    double kept = 0.0;
    for (const auto& [a, va] : m1.focal())
        for (const auto& [b, vb] : m2.focal()) {
            const double p = va * vb;
            if (const Subset c = a & b) {
                joint[c] += p;
                kept += p;
            } else {
                conflict += p;
            }
        }
    if (!(kept > 1e-12)) throw TotalConflict("total conflict: the evidence is contradictory");
    for (auto& [s, v] : joint) v /= kept;
    return {MassFunction(m1.frame(), std::move(joint)), std::min(conflict, 1.0)};
}

// ---- rule files -------------------------------------------------------------

namespace {

[[noreturn]] void rule_error(std::size_t line, const std::string& msg) {
    throw InputError("rules line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

bool valid_key(std::string_view k) {
    if (k.empty() || !(std::islower(static_cast<unsigned char>(k.front())) || k.front() == '_')) return false;
    return std::all_of(k.begin(), k.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_';
    });
}

Subset parse_subset(const Frame& frame, std::string_view text, std::size_t line) {
    const std::string t = csv::trim(text);
    if (t == "*") return frame.full();
    Subset s = 0;
    std::size_t pos = 0;
    while (pos <= t.size()) {
        const std::size_t plus = std::min(t.find('+', pos), t.size());
        const std::string name = csv::trim(std::string_view(t).substr(pos, plus - pos));
        const auto i = frame.index_of(name);
        if (!i) rule_error(line, "unknown frame element '" + name + "'");
        s |= Subset{1} << *i;
        pos = plus + 1;
    }
    return s;
}

Rule parse_rule(const Frame& frame, const std::string& text, std::size_t line) {
    const auto emit = text.find(" EMIT ");
    const auto open = text.find('{');
    const auto close = text.find('}');
    if (emit == std::string::npos || open == std::string::npos || close == std::string::npos || open < emit ||
        close < open)
        rule_error(line, "expected 'EMIT {...}'");

    Rule r;
    r.line = line;
    const auto head = words(std::string_view(text).substr(0, emit));
    if (head.size() < 4 || head[0] != "RULE" || head[2] != "WHEN")
        rule_error(line, "expected 'RULE <name> WHEN <trigger>'");
    r.name = head[1];
    if (head[3] != "context") {
        r.indicator = anomaly_kind_from_string(head[3]);
        if (!r.indicator) rule_error(line, "unknown indicator kind '" + head[3] + "'");
    }
    for (std::size_t i = 4; i < head.size(); ++i) {
        const std::string& w = head[i];
        if (w.rfind("severity>=", 0) == 0) {
            if (!r.indicator) rule_error(line, "severity threshold on a context rule");
            const auto x = csv::parse_double(w.substr(10));
            if (!x || *x < 0.0 || *x > 1.0) rule_error(line, "severity threshold must lie in [0, 1]");
            r.min_severity = *x;
            continue;
        }
        const auto eq = w.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == w.size()) rule_error(line, "bad condition '" + w + "'");
        std::string key = w.substr(0, eq), value = w.substr(eq + 1);
        if (!valid_key(key)) rule_error(line, "bad context field '" + key + "'");
        if (key == "ownership_risk" && !ownership_risk_from_string(value))
            rule_error(line, "unknown ownership_risk value '" + value + "'");
        if (key == "ship_type" && !ship_type_from_string(value))
            rule_error(line, "unknown ship_type value '" + value + "'");
        r.conditions.emplace_back(std::move(key), std::move(value));
    }
    if (!r.indicator && r.conditions.empty()) rule_error(line, "context rule without conditions");

    double total = 0.0;
    const std::string body = text.substr(open + 1, close - open - 1);
    for (const auto& item : csv::split(body)) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos) rule_error(line, "expected '<subset>:<mass>' in EMIT");
        const Subset s = parse_subset(frame, std::string_view(item).substr(0, colon), line);
        const auto m = csv::parse_double(item.substr(colon + 1));
        if (!m || *m < 0.0 || *m > 1.0) rule_error(line, "mass must lie in [0, 1]");
        r.emit.emplace_back(s, *m);
        total += *m;
    }
    if (r.emit.empty()) rule_error(line, "EMIT is empty");
    if (total > 1.0 + 1e-9) rule_error(line, "EMIT masses sum above 1");

    const auto tail = words(std::string_view(text).substr(close + 1));
    if (tail.size() != 2 || tail[0] != "RELIABILITY") rule_error(line, "expected 'RELIABILITY <r>' after EMIT");
    const auto rel = csv::parse_double(tail[1]);
    if (!rel || *rel < 0.0 || *rel > 1.0) rule_error(line, "reliability must lie in [0, 1]");
    r.reliability = *rel;
    return r;
}

}  // namespace

RuleSet parse_rules(std::istream& in) {
    RuleSet set;
    bool frame_seen = false;
    std::set<std::string> names;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (csv::is_skippable(line)) continue;
        const auto w = words(line);
        if (w.front() == "FRAME") {
            if (frame_seen || !set.rules.empty()) rule_error(n, "FRAME must come once, before any rule");
            try {
                set.frame = Frame(std::vector<std::string>(w.begin() + 1, w.end()));
            } catch (const InputError& e) {
                rule_error(n, e.what());
            }
            frame_seen = true;
            continue;
        }
        if (w.front() != "RULE") rule_error(n, "expected FRAME or RULE");
        Rule r = parse_rule(set.frame, line, n);
        if (!names.insert(r.name).second) rule_error(n, "rule name '" + r.name + "' repeated");
        set.rules.push_back(std::move(r));
    }
    if (set.rules.empty()) throw InputError("rule set is empty");
    return set;
}

RuleSet load_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open rule file: " + path.string());
    try {
        return parse_rules(in);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

// ---- assessment ---------------------------------------------------------------

namespace {

std::optional<std::string> context_value(const AssessmentContext& ctx, const std::string& key) {
    if (key == "ownership_risk") return std::string(to_string(ctx.vessel.ownership_risk));
    if (key == "ship_type") {
        if (!ctx.vessel.ship_type) return std::nullopt;
        return std::string(to_string(*ctx.vessel.ship_type));
    }
    const auto it = ctx.intel.find(key);
    if (it == ctx.intel.end()) return std::nullopt;
    return it->second;
}

struct Fired {
    const Rule* rule;
    double severity;
    MassFunction mass;
};

MassFunction fold(const Frame& frame, std::span<const Fired> fired, std::optional<std::size_t> skip,
                  std::vector<double>* conflicts) {
    MassFunction acc = MassFunction::vacuous(frame);
    for (std::size_t i = 0; i < fired.size(); ++i) {
        if (skip && *skip == i) continue;
        auto c = combine_dempster(acc, fired[i].mass);
        if (conflicts) conflicts->push_back(c.conflict);
        acc = std::move(c.mass);
    }
    return acc;
}

}  // namespace

ThreatAssessment assess(Mmsi mmsi, std::span<const AnomalyEvent> events, const AssessmentContext& context,
                        const RuleSet& rules) {
    if (rules.rules.empty()) throw InputError("assess: rule set is empty");
    const Frame& frame = rules.frame;

    std::map<AnomalyKind, double> worst;
    for (const auto& e : events) {
        if (e.mmsi != mmsi) continue;
        auto [it, fresh] = worst.emplace(e.kind, e.severity);
        if (!fresh) it->second = std::max(it->second, e.severity);
    }

    std::vector<Fired> fired;
    for (const auto& r : rules.rules) {
        double sev = 1.0;
        if (r.indicator) {
            const auto it = worst.find(*r.indicator);
            if (it == worst.end() || !(it->second > 0.0) || it->second < r.min_severity) continue;
            sev = it->second;
        }
        const bool holds = std::all_of(r.conditions.begin(), r.conditions.end(), [&](const auto& c) {
            const auto v = context_value(context, c.first);
            return v && *v == c.second;
        });
        if (!holds) continue;

        std::map<Subset, double> m;
        double used = 0.0;
        for (const auto& [s, v] : r.emit) {
            m[s] += v * sev;
            used += v * sev;
        }
        m[frame.full()] += std::max(0.0, 1.0 - used);
        fired.push_back({&r, sev, discount(MassFunction(frame, std::move(m)), r.reliability)});
    }

    ThreatAssessment out;
    out.mmsi = mmsi;
    out.target = frame.index_of("threat") ? "threat" : frame.elements().back();
    const Subset target = frame.singleton(out.target);

    std::vector<double> conflicts;
    out.mass = fold(frame, fired, std::nullopt, &conflicts);
    double keep = 1.0;
    for (double k : conflicts) keep *= 1.0 - k;
    out.conflict = 1.0 - keep;

    for (const auto& e : frame.elements()) {
        const Subset s = frame.singleton(e);
        out.singletons.emplace_back(e, std::make_pair(out.mass.belief(s), out.mass.plausibility(s)));
    }
    const double bel = out.mass.belief(target);
    for (std::size_t i = 0; i < fired.size(); ++i) {
        const MassFunction without = fold(frame, fired, i, nullptr);
        out.contributions.push_back(
            {fired[i].rule->name, fired[i].severity, conflicts[i], bel - without.belief(target)});
    }
    return out;
}

nlohmann::json to_json(const ThreatAssessment& a) {
    nlohmann::json j;
    j["mmsi"] = a.mmsi;
    j["target"] = a.target;
    j["conflict"] = a.conflict;
    nlohmann::json masses = nlohmann::json::array();
    for (const auto& [s, v] : a.mass.focal()) masses.push_back({{"set", a.mass.frame().describe(s)}, {"mass", v}});
    j["mass"] = masses;
    nlohmann::json singles = nlohmann::json::object();
    for (const auto& [name, bp] : a.singletons) singles[name] = {{"belief", bp.first}, {"plausibility", bp.second}};
    j["hypotheses"] = singles;
    nlohmann::json contrib = nlohmann::json::array();
    for (const auto& c : a.contributions)
        contrib.push_back({{"rule", c.rule},
                           {"severity", c.severity},
                           {"conflict", c.conflict},
                           {"belief_delta", c.belief_delta}});
    j["contributions"] = contrib;
    return j;
}

// ---- navigational status ------------------------------------------------------

std::string_view to_string(TrajectoryClass c) {
    switch (c) {
        case TrajectoryClass::underway: return "underway";
        case TrajectoryClass::drifting: return "drifting";
        case TrajectoryClass::anchored: return "anchored";
    }
    return "underway";
}

std::optional<TrajectoryClass> trajectory_class_from_string(std::string_view s) {
    if (s == "underway") return TrajectoryClass::underway;
    if (s == "drifting") return TrajectoryClass::drifting;
    if (s == "anchored") return TrajectoryClass::anchored;
    return std::nullopt;
}

namespace {

// nullopt when the status says nothing checkable
std::optional<bool> status_matches(NavStatus s, TrajectoryClass c) {
    switch (s) {
        case NavStatus::under_way_engine:
        case NavStatus::under_way_sailing:
        case NavStatus::constrained_by_draught: return c == TrajectoryClass::underway;
        case NavStatus::at_anchor:
        case NavStatus::moored:
        case NavStatus::aground: return c == TrajectoryClass::anchored;
        case NavStatus::not_under_command: return c != TrajectoryClass::underway;
        case NavStatus::engaged_in_fishing:
        case NavStatus::restricted_manoeuvrability: return true;
        case NavStatus::undefined: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

MassFunction check_status_consistency(const Track& track, TimeWindow window,
                                      std::optional<TrajectoryClass> classifier_label,
                                      const StatusCheckParams& params) {
    if (!(params.cap >= 0.0 && params.cap <= 1.0)) throw InputError("status check cap must lie in [0, 1]");
    if (!(params.anchored_max_kn >= 0.0 && params.anchored_max_kn < params.drift_threshold_kn))
        throw InputError("status check: need 0 <= anchored speed < drift threshold");
    const Frame frame = consistency_frame();
    const auto& pts = track.points;
    double checked = 0.0, mismatched = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = std::max(static_cast<double>(pts[i].t), window.start);
        const double b = std::min(static_cast<double>(pts[i + 1].t), window.end);
        if (!(b > a) || !pts[i].nav_status) continue;
        TrajectoryClass c = TrajectoryClass::underway;
        if (classifier_label)
            c = *classifier_label;
        else if (pts[i].sog <= params.anchored_max_kn)
            c = TrajectoryClass::anchored;
        else if (pts[i].sog < params.drift_threshold_kn)
            c = TrajectoryClass::drifting;
        const auto ok = status_matches(*pts[i].nav_status, c);
        if (!ok) continue;
        checked += b - a;
        if (!*ok) mismatched += b - a;
    }
    if (!(checked > 0.0)) return MassFunction::vacuous(frame);
    const double f = mismatched / checked;
    std::map<Subset, double> m;
    m[frame.singleton("inconsistent")] = params.cap * f;
    m[frame.singleton("consistent")] = params.cap * (1.0 - f);
    m[frame.full()] = 1.0 - params.cap;
    return MassFunction(frame, std::move(m));
}

}  // namespace ucimon
