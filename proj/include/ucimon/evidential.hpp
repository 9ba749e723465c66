#ifndef UCIMON_EVIDENTIAL_HPP
#define UCIMON_EVIDENTIAL_HPP

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ucimon/ais.hpp"
#include "ucimon/anomaly.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/kinematics.hpp"

namespace ucimon {

/// Subset of a frame as a bitmask over its ordered elements.
using Subset = std::uint32_t;

inline constexpr std::size_t kMaxFrameSize = 16;

/// Ordered set of mutually exclusive hypotheses.
class Frame {
public:
    /// Throws InputError for fewer than 2, more than 16 or repeated elements.
    explicit Frame(std::vector<std::string> elements);
    Frame(std::initializer_list<std::string> elements) : Frame(std::vector<std::string>(elements)) {}

    std::size_t size() const { return elements_.size(); }
    const std::vector<std::string>& elements() const { return elements_; }
    Subset full() const { return static_cast<Subset>((1u << elements_.size()) - 1u); }
    std::optional<std::size_t> index_of(std::string_view name) const;
    Subset singleton(std::string_view name) const;  // throws InputError when unknown
    Subset subset(std::initializer_list<std::string_view> names) const;
    std::string describe(Subset s) const;  // "{a,b}"

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    std::vector<std::string> elements_;
};

/// {benign, suspicious, threat}
Frame threat_frame();

/// Normalized basic belief assignment stored sparsely by focal set.
class MassFunction {
public:
    /// All mass on the full frame.
    static MassFunction vacuous(const Frame& frame);

    /// Throws InputError on negative masses, mass on the empty set, subsets
    /// outside the frame, or a total that differs from 1 by more than 1e-9.
    /// Zero entries are dropped.
    MassFunction(Frame frame, std::map<Subset, double> masses);

    const Frame& frame() const { return frame_; }
    const std::map<Subset, double>& focal() const { return masses_; }
    double mass(Subset a) const;
    double belief(Subset a) const;
    double plausibility(Subset a) const;
    bool is_vacuous() const;

private:
    Frame frame_;
    std::map<Subset, double> masses_;
};

/// Contradictory evidence: the conjunctive combination puts all mass on the
/// empty set.
class TotalConflict : public InputError {
public:
    using InputError::InputError;
};

/// Scales every focal mass by `reliability` and moves the rest to the frame.
MassFunction discount(const MassFunction& m, double reliability);

struct Combination {
    MassFunction mass;
    double conflict = 0.0;  // mass the conjunctive rule put on the empty set
};

/// Dempster's normalized rule. Throws InputError on differing frames and
/// TotalConflict when the conflict reaches 1.
Combination combine_dempster(const MassFunction& m1, const MassFunction& m2);

/// One line of a rule file, see parse_rules for the grammar.
struct Rule {
    std::string name;
    std::optional<AnomalyKind> indicator;  // empty for context-only rules
    double min_severity = 0.0;
    std::vector<std::pair<std::string, std::string>> conditions;  // context field = value
    std::vector<std::pair<Subset, double>> emit;
    double reliability = 1.0;
    std::size_t line = 0;
};

struct RuleSet {
    Frame frame = threat_frame();
    std::vector<Rule> rules;
};

/// Line-oriented rule grammar; blank lines and lines starting with '#' are
/// ignored:
///
///   FRAME <element> <element> ...          (optional, once, before any rule)
///   RULE <name> WHEN <trigger> [severity>=<x>] [<field>=<value> ...]
///        EMIT {<subset>:<mass>, ...} RELIABILITY <r>
///
/// A rule is written on one line. <trigger> is an anomaly kind or the word
/// `context` for rules that fire on context fields alone. <subset> is one or
/// more frame elements joined by '+', or `*` for the whole frame. Masses are
/// in [0, 1] and sum to at most 1; the remainder goes to the whole frame.
/// <field> is ownership_risk, ship_type or an intel key.
///
/// Throws InputError naming the line on any syntax error, unknown kind or
/// element, and on an empty rule set.
RuleSet parse_rules(std::istream& in);
RuleSet load_rules(const std::filesystem::path& path);

/// Illustrative rule set on {benign, suspicious, threat}. Its masses are
/// judgment calls for demonstration, not elicited expert knowledge.
std::string_view default_rules_text();

struct AssessmentContext {
    VesselInfo vessel;
    std::map<std::string, std::string> intel;
};

struct RuleContribution {
    std::string rule;
    double severity = 0.0;  // event severity that scaled the template, 1 for context rules
    double conflict = 0.0;  // conflict when this rule's mass entered the fold
    double belief_delta = 0.0;  // belief in the target minus belief without this rule
};

struct ThreatAssessment {
    Mmsi mmsi = 0;
    MassFunction mass = MassFunction::vacuous(threat_frame());
    std::vector<std::pair<std::string, std::pair<double, double>>> singletons;  // name -> (belief, plausibility)
    double conflict = 0.0;  // 1 - prod(1 - k_i) over the fold
    std::string target;     // hypothesis the contributions refer to
    std::vector<RuleContribution> contributions;
};

/// Fires every rule whose trigger and conditions hold for this vessel. An
/// indicator rule uses the most severe event of its kind for the vessel;
/// its template masses are scaled by that severity (remainder to the frame)
/// and the result discounted by the rule's reliability. Firing rules are
/// combined by Dempster's rule in rule-file order. Contributions are
/// leave-one-out differences in belief of the target hypothesis ("threat"
/// when the frame has it, else the last element).
///
/// Throws InputError on an empty rule set.
ThreatAssessment assess(Mmsi mmsi, std::span<const AnomalyEvent> events, const AssessmentContext& context,
                        const RuleSet& rules);

nlohmann::json to_json(const ThreatAssessment& a);

enum class TrajectoryClass { underway, drifting, anchored };

std::string_view to_string(TrajectoryClass c);
std::optional<TrajectoryClass> trajectory_class_from_string(std::string_view s);

/// {consistent, inconsistent}
Frame consistency_frame();

struct StatusCheckParams {
    double anchored_max_kn = 0.5;
    double drift_threshold_kn = 3.0;
    double cap = 0.8;  // mass committed at full mismatch or full agreement
};

/// Compares each report's nav_status against a trajectory class over the
/// time that report holds (to the next report). The class comes from the
/// report's sog unless `classifier_label` is given, in which case it applies
/// throughout. With f the share of status-bearing time that mismatches:
/// m({inconsistent}) = cap·f, m({consistent}) = cap·(1 − f), rest on the
/// frame. Vacuous when no report in the window carries a usable status.
MassFunction check_status_consistency(const Track& track, TimeWindow window,
                                      std::optional<TrajectoryClass> classifier_label = std::nullopt,
                                      const StatusCheckParams& params = {});

}  // namespace ucimon

#endif  // UCIMON_EVIDENTIAL_HPP
