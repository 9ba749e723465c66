#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/netrisk.hpp"

using namespace ucimon;

namespace {

InfraGraph random_multigraph(Rng& rng, std::size_t n, std::size_t edges) {
    InfraGraph g;
    for (std::size_t i = 0; i < n; ++i) g.add_node("n" + std::to_string(i));
    for (std::size_t k = 0; k < edges; ++k) {
        const std::size_t a = rng.below(n);
        std::size_t b = rng.below(n - 1);
        if (b >= a) ++b;
        g.add_edge("n" + std::to_string(a), "n" + std::to_string(b));
    }
    return g;
}

// Largest component by breadth-first search over an adjacency matrix rebuilt
// from scratch for the given survivors.
std::size_t giant_by_search(const InfraGraph& g, const std::vector<bool>& node_alive, const std::vector<bool>& edge_alive) {
    const std::size_t n = g.node_count();
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (std::size_t e = 0; e < g.edge_count(); ++e)
        if (edge_alive[e] && node_alive[g.edge(e).u] && node_alive[g.edge(e).v])
            adj[g.edge(e).u][g.edge(e).v] = adj[g.edge(e).v][g.edge(e).u] = 1;
    std::vector<char> seen(n, 0);
    std::size_t best = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!node_alive[s] || seen[s]) continue;
        std::vector<std::size_t> stack{s};
        seen[s] = 1;
        std::size_t size = 0;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            ++size;
            for (std::size_t w = 0; w < n; ++w)
                if (adj[v][w] && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        best = std::max(best, size);
    }
    return best;
}

// Every shortest path as an explicit edge sequence; each pair spreads one
// unit of flow evenly over its paths.
Betweenness betweenness_by_enumeration(const InfraGraph& g) {
    const std::size_t n = g.node_count();
    constexpr std::size_t kFar = 1000;
    std::vector<std::vector<std::size_t>> dist(n, std::vector<std::size_t>(n, kFar));
    for (std::size_t i = 0; i < n; ++i) dist[i][i] = 0;
    for (std::size_t e = 0; e < g.edge_count(); ++e) dist[g.edge(e).u][g.edge(e).v] = dist[g.edge(e).v][g.edge(e).u] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);

    Betweenness bc{std::vector<double>(n, 0.0), std::vector<double>(g.edge_count(), 0.0)};
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = s + 1; t < n; ++t) {
            if (dist[s][t] >= kFar) continue;
            std::vector<std::vector<std::size_t>> paths;  // edge lists
            std::vector<std::size_t> cur;
            const auto dfs = [&](auto&& self, std::size_t v) -> void {
                if (v == t) {
                    paths.push_back(cur);
                    return;
                }
                for (std::size_t e = 0; e < g.edge_count(); ++e) {
                    const auto& ed = g.edge(e);
                    if (ed.u != v && ed.v != v) continue;
                    const std::size_t w = ed.u == v ? ed.v : ed.u;
                    if (dist[s][w] != cur.size() + 1 || dist[w][t] + cur.size() + 1 != dist[s][t]) continue;
                    cur.push_back(e);
                    self(self, w);
                    cur.pop_back();
                }
            };
            dfs(dfs, s);
            const double share = 1.0 / static_cast<double>(paths.size());
            for (const auto& p : paths) {
                std::size_t v = s;
                for (std::size_t i = 0; i < p.size(); ++i) {
                    bc.edge[p[i]] += share;
                    v = g.edge(p[i]).u == v ? g.edge(p[i]).v : g.edge(p[i]).u;
                    if (i + 1 < p.size()) bc.node[v] += share;
                }
            }
        }
    return bc;
}

std::vector<double> giant_series(const std::vector<CurvePoint>& c) {
    std::vector<double> out;
    for (const auto& p : c) out.push_back(p.giant_fraction);
    return out;
}

}  // namespace

TEST_CASE("betweenness equals shortest-path enumeration") {
    Rng rng(101);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 2 + rng.below(8);
        const auto g = random_multigraph(rng, n, rng.below(3 * n));
        const auto a = betweenness(g);
        const auto b = betweenness_by_enumeration(g);
        for (std::size_t i = 0; i < n; ++i) CHECK(a.node[i] == doctest::Approx(b.node[i]).epsilon(1e-12).scale(1.0));
        for (std::size_t e = 0; e < g.edge_count(); ++e)
            CHECK(a.edge[e] == doctest::Approx(b.edge[e]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("robustness curves match exhaustive component search") {
    Rng rng(102);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        const auto g = random_multigraph(rng, std::max<std::size_t>(n, 2), rng.below(3 * n + 1));
        const std::size_t N = g.node_count();
        const auto Nd = static_cast<double>(N);

        // degree targeting: recompute every degree from the survivors each step
        {
            std::vector<bool> alive(N, true);
            const std::vector<bool> edges(g.edge_count(), true);
            std::vector<double> expected{static_cast<double>(giant_by_search(g, alive, edges)) / Nd};
            for (std::size_t step = 0; step < N; ++step) {
                std::size_t pick = N, best = 0;
                for (std::size_t i = 0; i < N; ++i) {
                    if (!alive[i]) continue;
                    std::size_t d = 0;
                    for (std::size_t e = 0; e < g.edge_count(); ++e)
                        if ((g.edge(e).u == i && alive[g.edge(e).v]) || (g.edge(e).v == i && alive[g.edge(e).u])) ++d;
                    if (pick == N || d > best || (d == best && natural_less(g.node(i).id, g.node(pick).id))) {
                        pick = i;
                        best = d;
                    }
                }
                alive[pick] = false;
                expected.push_back(static_cast<double>(giant_by_search(g, alive, edges)) / Nd);
            }
            FailureScenario s;
            s.mode = FailureMode::degree_targeted;
            const auto curve = robustness_curve(g, s);
            CHECK(giant_series(curve) == expected);
            CHECK(curve.back().fraction_removed == 1.0);
        }

        // explicit orders over nodes and over edges
        for (const auto target : {FailureTarget::nodes, FailureTarget::edges}) {
            const bool nodes = target == FailureTarget::nodes;
            const std::size_t total = nodes ? N : g.edge_count();
            if (total == 0) continue;
            std::vector<std::size_t> order(total);
            std::iota(order.begin(), order.end(), std::size_t{0});
            for (std::size_t i = total; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
            const std::size_t k = rng.below(total + 1);
            FailureScenario s;
            s.mode = FailureMode::custom;
            s.target = target;
            for (std::size_t i = 0; i < k; ++i) s.order.push_back(nodes ? g.node(order[i]).id : std::to_string(order[i]));

            std::vector<bool> na(N, true), ea(g.edge_count(), true);
            std::vector<double> expected{static_cast<double>(giant_by_search(g, na, ea)) / Nd};
            for (std::size_t i = 0; i < k; ++i) {
                (nodes ? na : ea)[order[i]] = false;
                expected.push_back(static_cast<double>(giant_by_search(g, na, ea)) / Nd);
            }
            const auto curve = robustness_curve(g, s);
            CHECK(giant_series(curve) == expected);
            for (std::size_t i = 0; i < curve.size(); ++i)
                CHECK(curve[i].fraction_removed == static_cast<double>(i) / static_cast<double>(total));
        }

        // random failures: a permutation, so the curve ends empty and never grows
        FailureScenario r;
        r.seed = static_cast<std::uint64_t>(trial);
        const auto rc = robustness_curve(g, r);
        REQUIRE(rc.size() == N + 1);
        CHECK(rc.back().giant_fraction == 0.0);
        for (std::size_t i = 1; i < rc.size(); ++i) CHECK(rc[i].giant_fraction <= rc[i - 1].giant_fraction);
        CHECK(giant_series(robustness_curve(g, r)) == giant_series(rc));
    }
}

TEST_CASE("curve validation") {
    InfraGraph empty;
    CHECK_THROWS_AS(robustness_curve(empty, {}), InputError);
    InfraGraph g;
    g.add_node("a");
    g.add_node("b");
    g.add_edge("a", "b");
    FailureScenario s;
    s.mode = FailureMode::degree_targeted;
    s.target = FailureTarget::edges;
    CHECK_THROWS_AS(robustness_curve(g, s), InputError);
    s.mode = FailureMode::custom;
    s.order = {"7"};
    CHECK_THROWS_AS(robustness_curve(g, s), InputError);
    s.target = FailureTarget::nodes;
    s.order = {"a", "a"};
    CHECK_THROWS_AS(robustness_curve(g, s), InputError);
    const std::vector<CurvePoint> square{{0, 1}, {0.5, 1}, {1, 0}};
    CHECK(curve_area(square) == doctest::Approx(0.75));
}

TEST_CASE("overload cascade on a broken ring") {
    // C6: every edge carries 4.5 pairs; opened into a path the three middle
    // edges carry 8, 9 and 8, above 1.2 * 4.5, while the end edges carry 5.
    InfraGraph g;
    for (int i = 0; i < 6; ++i) g.add_node(std::to_string(i));
    for (int i = 0; i < 6; ++i) g.add_edge(std::to_string(i), std::to_string((i + 1) % 6));
    const auto base = betweenness(g);
    for (double x : base.edge) CHECK(x == doctest::Approx(4.5));

    const std::vector<std::size_t> cut{0};
    const auto r = cascade_simulate(g, cut, 1.2);
    REQUIRE(r.timeline.size() == 2);
    CHECK(r.timeline[0] == std::vector<std::size_t>{0});
    CHECK(r.timeline[1] == std::vector<std::size_t>{2, 3, 4});
    CHECK(r.rounds == 1);
    CHECK(r.surviving_edge_fraction == doctest::Approx(2.0 / 6.0));
    CHECK(r.giant_fraction == doctest::Approx(2.0 / 6.0));

    const auto calm = cascade_simulate(g, cut, 2.0);
    CHECK(calm.rounds == 0);
    CHECK(calm.surviving_edge_fraction == doctest::Approx(5.0 / 6.0));
    CHECK_THROWS_AS(cascade_simulate(g, cut, 0.9), InputError);
    const std::vector<std::size_t> bad{9};
    CHECK_THROWS_AS(cascade_simulate(g, bad, 1.2), InputError);
}

TEST_CASE("cascades never revive edges and stop at a fixed point") {
    Rng rng(103);
    for (int trial = 0; trial < 60; ++trial) {
        const auto g = barabasi_albert(20 + rng.below(20), 2, static_cast<std::uint64_t>(trial));
        const std::vector<std::size_t> init{rng.below(g.edge_count())};
        const double alpha = rng.uniform(1.0, 1.6);
        const auto r = cascade_simulate(g, init, alpha);
        std::set<std::size_t> failed;
        for (const auto& round : r.timeline)
            for (auto e : round) CHECK(failed.insert(e).second);
        CHECK(failed.size() == static_cast<std::size_t>(std::count(r.edge_alive.begin(), r.edge_alive.end(), false)));
        const auto load = betweenness(g, std::vector<bool>(g.node_count(), true), r.edge_alive);
        const auto cap = betweenness(g);
        for (std::size_t e = 0; e < g.edge_count(); ++e)
            if (r.edge_alive[e]) CHECK(load.edge[e] <= alpha * cap.edge[e] * (1 + 1e-9) + 1e-12);
    }
}

TEST_CASE("preferential attachment graphs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 50, m = 3;
        const auto g = barabasi_albert(n, m, seed);
        CHECK(g.node_count() == n);
        CHECK(g.edge_count() == m * (m + 1) / 2 + (n - m - 1) * m);
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            const auto& ed = g.edge(e);
            CHECK(ed.u != ed.v);
            CHECK(seen.insert(std::minmax(ed.u, ed.v)).second);
        }
        CHECK(giant_component_size(g, std::vector<bool>(n, true), std::vector<bool>(g.edge_count(), true)) == n);
        std::ostringstream a, b;
        write_graph_csv(a, g);
        write_graph_csv(b, barabasi_albert(n, m, seed));
        CHECK(a.str() == b.str());
    }
    CHECK_THROWS_AS(barabasi_albert(3, 3, 0), InputError);
    CHECK_THROWS_AS(barabasi_albert(10, 0, 0), InputError);
}

TEST_CASE("graph CSV files") {
    const std::filesystem::path data(UCIMON_TEST_DATA);
    const auto g = load_graph(data / "cables_edges.csv", data / "cables_nodes.csv");
    CHECK(g.node_count() == 11);
    CHECK(g.edge_count() == 14);
    CHECK(g.node(0).id == "Aberdeen");
    CHECK(g.node(*g.node_index("Shetland")).pos.has_value());
    CHECK(g.edge(13).kind == "pipeline");

    std::stringstream out;
    write_graph_csv(out, g);
    const auto back = read_graph_csv(out);
    REQUIRE(back.edge_count() == g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        CHECK(back.node(back.edge(e).u).id == g.node(g.edge(e).u).id);
        CHECK(back.edge(e).kind == g.edge(e).kind);
    }

    const auto cp = choke_points(g, 3);
    REQUIRE(cp.nodes.size() == 3);
    for (std::size_t i = 1; i < cp.nodes.size(); ++i) CHECK(cp.nodes[i - 1].score >= cp.nodes[i].score);
    const auto bc = betweenness(g);
    CHECK(cp.nodes[0].score == *std::max_element(bc.node.begin(), bc.node.end()));

    std::istringstream loop("src,dst,kind,capacity\na,a,cable,1\n");
    CHECK_THROWS_AS(read_graph_csv(loop), InputError);
    std::istringstream header("from,to\n");
    CHECK_THROWS_AS(read_graph_csv(header), InputError);
    std::istringstream edges("src,dst,kind,capacity\na,b,cable,1\n");
    std::istringstream nodes("id,lat,lon\na,50,0\n");
    CHECK_THROWS_AS(read_graph_csv(edges, &nodes), InputError);
    std::istringstream cap("src,dst,kind,capacity\na,b,cable,0\n");
    CHECK_THROWS_AS(read_graph_csv(cap), InputError);
}

TEST_CASE("natural id order") {
    CHECK(natural_less("2", "10"));
    CHECK_FALSE(natural_less("10", "2"));
    CHECK(natural_less("10", "a"));
    CHECK(natural_less("Aberdeen", "Bude"));
    CHECK_FALSE(natural_less("x", "x"));
}
