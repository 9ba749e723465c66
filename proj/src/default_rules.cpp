#include "ucimon/evidential.hpp"

namespace ucimon {

std::string_view default_rules_text() {
    return R"(# Illustrative rules for UCI threat assessment.
# RULE <name> WHEN <trigger> [severity>=x] [field=value ...] EMIT {subset:mass, ...} RELIABILITY r
FRAME benign suspicious threat

RULE ais_gap WHEN ais_gap EMIT {threat:0.2, suspicious+threat:0.5} RELIABILITY 0.9
RULE loiter WHEN loiter_near_uci EMIT {threat:0.3, suspicious+threat:0.4} RELIABILITY 0.8
RULE search WHEN search_pattern EMIT {threat:0.4, suspicious+threat:0.3} RELIABILITY 0.7
RULE zone WHEN zone_entry EMIT {threat:0.05, suspicious+threat:0.2} RELIABILITY 0.6
RULE off_lane WHEN route_deviation EMIT {threat:0.05, suspicious+threat:0.2} RELIABILITY 0.5
RULE dark_target WHEN unassociated_sar EMIT {threat:0.3, suspicious+threat:0.4} RELIABILITY 0.7
RULE owner_high WHEN context ownership_risk=high EMIT {threat:0.3, suspicious+threat:0.3} RELIABILITY 0.8
RULE owner_low WHEN context ownership_risk=low EMIT {benign:0.3, benign+suspicious:0.3} RELIABILITY 0.8
RULE status_mismatch WHEN context nav_status=inconsistent EMIT {threat:0.1, suspicious+threat:0.4} RELIABILITY 0.6
RULE fishing_crossing WHEN zone_entry ship_type=fishing EMIT {benign+suspicious:0.3} RELIABILITY 0.7
)";
}

}  // namespace ucimon
