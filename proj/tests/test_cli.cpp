#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "ucimon/ais.hpp"
#include "ucimon/cli.hpp"
#include "ucimon/csv.hpp"

using namespace ucimon;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

// Data rows of a CSV written by the tool, header comments dropped.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
    std::istringstream in(test::read_file(p));
    std::vector<std::vector<std::string>> out;
    std::string line;
    while (std::getline(in, line))
        if (!csv::is_skippable(line)) out.push_back(csv::split(line));
    return out;
}

const fs::path& scenario_dir() {
    static const fs::path dir = [] {
        const auto d = test::temp_dir("cli_scenario");
        const auto r = cli({"generate", "--scenario", "baltic", "-o", (d / "sc").string()});
        REQUIRE(r.code == 0);
        return d / "sc";
    }();
    return dir;
}

}  // namespace

TEST_CASE("parse errors and help") {
    CHECK(cli({"--version"}).code == 0);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"ingest", "--no-such-flag"}).code == 1);
    CHECK(cli({"generate", "--scenario", "atlantis"}).code == 1);
    CHECK(cli({"predict"}).code == 1);  // --mmsi is required
}

TEST_CASE("configuration problems are listed together and exit 1") {
    const auto dir = test::temp_dir("cli_badcfg");
    const auto r = cli({"associate", "--gate-km", "-1", "--max_gap_s", "x", "--runs-root", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("invalid configuration (4 problems)") != std::string::npos);
    CHECK(r.err.find("gate_km") != std::string::npos);
    CHECK(r.err.find("max_gap_s") != std::string::npos);
    CHECK(r.err.find("'ais' is required") != std::string::npos);
    CHECK(r.err.find("'detections' is required") != std::string::npos);
    CHECK(fs::is_empty(dir));
    CHECK(cli({"ingest", "-c", (dir / "none.cfg").string()}).code == 1);
}

TEST_CASE("ingest writes tracks and a summary") {
    const auto out = test::temp_dir("cli_ingest") / "run";
    const auto r = cli({"ingest", "-c", (scenario_dir() / "scenario.cfg").string(), "-o", out.string()});
    REQUIRE(r.code == 0);
    const auto text = test::read_file(out / "tracks.csv");
    CHECK(text.rfind("# ucimon ", 0) == 0);
    const auto summary = rows(out / "ingest_summary.csv");
    REQUIRE(summary.size() == 7);
    CHECK(summary[0] == std::vector<std::string>{"metric", "value"});
    CHECK(rows(out / "ingest_errors.csv").size() == 1);  // header only
    CHECK(fs::exists(out / "config.resolved"));
}

TEST_CASE("predict at zero lead time returns the anchor") {
    const auto out = test::temp_dir("cli_predict") / "run";
    const auto cfg = (scenario_dir() / "scenario.cfg").string();
    const auto r = cli({"predict", "-c", cfg, "--mmsi", "273000001", "--delta-s", "0", "--delta-s", "3600", "-o",
                        out.string()});
    REQUIRE(r.code == 0);
    const auto p = rows(out / "predictions.csv");
    REQUIRE(p.size() == 3);
    std::istringstream ais(test::read_file(scenario_dir() / "ais.csv"));
    const auto tracks = build_tracks(parse_ais_csv(ais).points, 0).tracks;
    const auto it = std::find_if(tracks.begin(), tracks.end(), [](const Track& t) { return t.mmsi == 273000001; });
    REQUIRE(it != tracks.end());
    CHECK(*csv::parse_double(p[1][3]) == it->points.back().pos.lat);
    CHECK(*csv::parse_double(p[1][4]) == it->points.back().pos.lon);
    CHECK(p[1][10] == "0");
    CHECK(*csv::parse_double(p[2][10]) > 0.0);

    CHECK(cli({"predict", "-c", cfg, "--mmsi", "1", "-o", out.string()}).code == 1);
    CHECK(cli({"predict", "-c", cfg, "--mmsi", "273000001", "--delta-s", "-5", "-o", out.string()}).code == 1);
}

TEST_CASE("an empty rule file is an input error naming the file") {
    const auto dir = test::temp_dir("cli_rules");
    test::write_file(dir / "empty.rules", "# nothing here\n");
    const auto r = cli({"assess", "-c", (scenario_dir() / "scenario.cfg").string(), "--rule-file",
                        (dir / "empty.rules").string(), "-o", (dir / "run").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("empty.rules") != std::string::npos);
    CHECK(r.err.find("empty") != std::string::npos);
}

TEST_CASE("assess reads an events file without AIS") {
    const auto dir = test::temp_dir("cli_events");
    test::write_file(dir / "events.jsonl",
                     R"({"mmsi":5,"kind":"ais_gap","t_start":0,"t_end":90000,"severity":1,"zone":"","summary":"","fields":{}})"
                     "\n");
    test::write_file(dir / "rules", "RULE g WHEN ais_gap EMIT {threat:0.5} RELIABILITY 1\n");
    const auto r = cli({"assess", "--events", (dir / "events.jsonl").string(), "--rule_file", (dir / "rules").string(),
                        "-o", (dir / "run").string()});
    REQUIRE(r.code == 0);
    const auto text = test::read_file(dir / "run" / "assessments.jsonl");
    CHECK(text.find("\"mmsi\":5") != std::string::npos);
}

TEST_CASE("netrisk on the sample cable network") {
    const fs::path data(UCIMON_TEST_DATA);
    const auto out = test::temp_dir("cli_netrisk") / "run";
    const auto r = cli({"netrisk", "--graph-edges", (data / "cables_edges.csv").string(), "--graph-nodes",
                        (data / "cables_nodes.csv").string(), "--netrisk-seeds", "5", "-o", out.string()});
    REQUIRE(r.code == 0);
    CHECK(rows(out / "curve_targeted.csv").size() == 13);  // header, intact graph, 11 removals
    CHECK(rows(out / "choke_points.csv").size() > 1);
    CHECK(rows(out / "cascade.csv").size() >= 2);
}

TEST_CASE("identical runs produce identical directories") {
    const auto root = test::temp_dir("cli_determinism");
    const auto cfg = (scenario_dir() / "scenario.cfg").string();
    REQUIRE(cli({"pipeline", "-c", cfg, "-o", (root / "a").string()}).code == 0);
    REQUIRE(cli({"pipeline", "-c", cfg, "-o", (root / "b").string()}).code == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(root / "a")) {
        ++files;
        CHECK(test::read_file(e.path()) == test::read_file(root / "b" / e.path().filename()));
    }
    CHECK(files == static_cast<std::size_t>(std::distance(fs::directory_iterator(root / "b"), fs::directory_iterator())));
    CHECK(files > 10);

    // default run directories are named by content
    const auto x = cli({"ingest", "-c", cfg, "--runs-root", (root / "runs").string()});
    const auto y = cli({"ingest", "-c", cfg, "--runs-root", (root / "runs").string()});
    CHECK(x.out == y.out);
    CHECK(std::distance(fs::directory_iterator(root / "runs"), fs::directory_iterator()) == 1);
}
