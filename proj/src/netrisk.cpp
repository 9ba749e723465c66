#include "ucimon/netrisk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "ucimon/csv.hpp"
#include "ucimon/errors.hpp"
#include "ucimon/rng.hpp"

namespace ucimon {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view strip_zeros(std::string_view s) {
    while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
    return s;
}

}  // namespace

bool natural_less(std::string_view a, std::string_view b) {
    const bool na = all_digits(a), nb = all_digits(b);
    if (na != nb) return na;
    if (na) {
        const auto sa = strip_zeros(a), sb = strip_zeros(b);
        if (sa.size() != sb.size()) return sa.size() < sb.size();
        if (sa != sb) return sa < sb;
    }
    return a < b;
}

// ---- graph ------------------------------------------------------------------

void InfraGraph::add_node(std::string id, std::optional<GeoPoint> pos) {
    if (id.empty()) throw InputError("node id is empty");
    if (index_.count(id)) throw InputError("node '" + id + "' defined twice");
    const auto at = std::upper_bound(nodes_.begin(), nodes_.end(), id,
                                     [](const std::string& x, const InfraNode& n) { return natural_less(x, n.id); });
    const auto pos_i = static_cast<std::size_t>(at - nodes_.begin());
    nodes_.insert(at, InfraNode{std::move(id), pos});
    adj_.insert(adj_.begin() + static_cast<std::ptrdiff_t>(pos_i), std::vector<std::size_t>{});
    if (pos_i + 1 == nodes_.size()) {
        index_.emplace(nodes_.back().id, pos_i);
        return;
    }
    for (auto& e : edges_) {
        if (e.u >= pos_i) ++e.u;
        if (e.v >= pos_i) ++e.v;
    }
    reindex();
}

void InfraGraph::reindex() {
    index_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i].id, i);
}

std::optional<std::size_t> InfraGraph::node_index(std::string_view id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t InfraGraph::add_edge(std::string_view src, std::string_view dst, std::string kind, double capacity) {
    const auto u = node_index(src), v = node_index(dst);
    if (!u) throw InputError("edge endpoint '" + std::string(src) + "' is not a node");
    if (!v) throw InputError("edge endpoint '" + std::string(dst) + "' is not a node");
    if (*u == *v) throw InputError("self-loop at node '" + std::string(src) + "'");
    if (!(capacity > 0.0) || !std::isfinite(capacity)) throw InputError("edge capacity must be > 0");
    edges_.push_back(InfraEdge{*u, *v, std::move(kind), capacity});
    adj_[*u].push_back(edges_.size() - 1);
    adj_[*v].push_back(edges_.size() - 1);
    return edges_.size() - 1;
}

InfraGraph read_graph_csv(std::istream& edges_csv, std::istream* nodes_csv) {
    InfraGraph g;
    std::string line;
    std::size_t n = 0;
    bool header = false;
    if (nodes_csv) {
        while (std::getline(*nodes_csv, line)) {
            ++n;
            if (csv::is_skippable(line)) continue;
            if (!header) {
                if (csv::trim(line) != "id,lat,lon") throw InputError("node file: expected header 'id,lat,lon'");
                header = true;
                continue;
            }
            const auto f = csv::split(line);
            if (f.size() != 3) throw InputError("node file line " + std::to_string(n) + ": expected 3 fields");
            const auto lat = csv::parse_double(f[1]), lon = csv::parse_double(f[2]);
            if (!lat || !lon || !is_valid(GeoPoint{*lat, *lon}))
                throw InputError("node file line " + std::to_string(n) + ": bad coordinates");
            g.add_node(csv::trim(f[0]), GeoPoint{*lat, normalize_lon(*lon)});
        }
        if (!header) throw InputError("node file has no header");
    }

    struct Row {
        std::string src, dst, kind;
        double cap;
        std::size_t line;
    };
    std::vector<Row> rows;
    n = 0;
    header = false;
    while (std::getline(edges_csv, line)) {
        ++n;
        if (csv::is_skippable(line)) continue;
        if (!header) {
            if (csv::trim(line) != "src,dst,kind,capacity")
                throw InputError("edge file: expected header 'src,dst,kind,capacity'");
            header = true;
            continue;
        }
        const auto f = csv::split(line);
        if (f.size() != 4) throw InputError("edge file line " + std::to_string(n) + ": expected 4 fields");
        const auto cap = csv::parse_double(f[3]);
        if (!cap) throw InputError("edge file line " + std::to_string(n) + ": capacity is not a number");
        rows.push_back({csv::trim(f[0]), csv::trim(f[1]), csv::trim(f[2]), *cap, n});
    }
    if (!header) throw InputError("edge file has no header");

    if (!nodes_csv) {
        std::set<std::string> ids;
        for (const auto& r : rows) {
            ids.insert(r.src);
            ids.insert(r.dst);
        }
        std::vector<std::string> sorted(ids.begin(), ids.end());
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return natural_less(a, b); });
        for (auto& id : sorted) g.add_node(std::move(id));
    }
    for (const auto& r : rows) {
        try {
            g.add_edge(r.src, r.dst, r.kind, r.cap);
        } catch (const InputError& e) {
            throw InputError("edge file line " + std::to_string(r.line) + ": " + e.what());
        }
    }
    return g;
}

InfraGraph load_graph(const std::filesystem::path& edges, const std::optional<std::filesystem::path>& nodes) {
    std::ifstream ein(edges);
    if (!ein) throw InputError("cannot open file: " + edges.string());
    if (!nodes) return read_graph_csv(ein, nullptr);
    std::ifstream nin(*nodes);
    if (!nin) throw InputError("cannot open file: " + nodes->string());
    return read_graph_csv(ein, &nin);
}

void write_graph_csv(std::ostream& out, const InfraGraph& g) {
    out << "src,dst,kind,capacity\n";
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        out << csv::escape(g.node(ed.u).id) << ',' << csv::escape(g.node(ed.v).id) << ',' << csv::escape(ed.kind)
            << ',' << csv::format_double(ed.capacity) << '\n';
    }
}

// ---- connectivity -------------------------------------------------------------

std::size_t giant_component_size(const InfraGraph& g, const std::vector<bool>& node_alive,
                                 const std::vector<bool>& edge_alive) {
    const std::size_t n = g.node_count();
    std::vector<std::size_t> parent(n), size(n, 1);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        if (!edge_alive[e]) continue;
        const auto& ed = g.edge(e);
        if (!node_alive[ed.u] || !node_alive[ed.v]) continue;
        std::size_t a = find(ed.u), b = find(ed.v);
        if (a == b) continue;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (node_alive[i] && find(i) == i) best = std::max(best, size[i]);
    return best;
}

std::string_view to_string(FailureMode m) {
    switch (m) {
        case FailureMode::random: return "random";
        case FailureMode::degree_targeted: return "degree_targeted";
        case FailureMode::custom: return "custom";
    }
    return "random";
}

std::optional<FailureMode> failure_mode_from_string(std::string_view s) {
    if (s == "random") return FailureMode::random;
    if (s == "degree_targeted") return FailureMode::degree_targeted;
    if (s == "custom") return FailureMode::custom;
    return std::nullopt;
}

namespace {

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
    return v;
}

std::vector<std::size_t> custom_order(const InfraGraph& g, const FailureScenario& s) {
    std::vector<std::size_t> out;
    std::set<std::size_t> seen;
    for (const auto& id : s.order) {
        std::size_t idx = 0;
        if (s.target == FailureTarget::nodes) {
            const auto i = g.node_index(id);
            if (!i) throw InputError("scenario: unknown node '" + id + "'");
            idx = *i;
        } else {
            const auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), idx);
            if (ec != std::errc{} || p != id.data() + id.size() || idx >= g.edge_count())
                throw InputError("scenario: unknown edge '" + id + "'");
        }
        if (!seen.insert(idx).second) throw InputError("scenario: '" + id + "' listed twice");
        out.push_back(idx);
    }
    return out;
}

}  // namespace

std::vector<CurvePoint> robustness_curve(const InfraGraph& g, const FailureScenario& scenario) {
    const std::size_t n = g.node_count();
    if (n == 0) throw InputError("robustness_curve: empty graph");
    const bool nodes = scenario.target == FailureTarget::nodes;
    if (scenario.mode == FailureMode::degree_targeted && !nodes)
        throw InputError("robustness_curve: degree targeting applies to nodes only");
    const std::size_t total = nodes ? n : g.edge_count();
    if (total == 0) throw InputError("robustness_curve: graph has no edges to remove");

    std::vector<bool> node_alive(n, true), edge_alive(g.edge_count(), true);
    std::vector<CurvePoint> curve;
    const auto N = static_cast<double>(n);
    curve.push_back({0.0, static_cast<double>(giant_component_size(g, node_alive, edge_alive)) / N});

    const auto record = [&](std::size_t removed) {
        curve.push_back({static_cast<double>(removed) / static_cast<double>(total),
                         static_cast<double>(giant_component_size(g, node_alive, edge_alive)) / N});
    };

    if (scenario.mode == FailureMode::degree_targeted) {
        std::vector<std::size_t> degree(n, 0);
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            ++degree[g.edge(e).u];
            ++degree[g.edge(e).v];
        }
        for (std::size_t step = 1; step <= n; ++step) {
            // nodes are indexed in id order, so the first maximum has the smallest id
            std::size_t pick = n;
            for (std::size_t i = 0; i < n; ++i)
                if (node_alive[i] && (pick == n || degree[i] > degree[pick])) pick = i;
            node_alive[pick] = false;
            for (std::size_t e : g.incident(pick)) {
                const auto& ed = g.edge(e);
                const std::size_t other = ed.u == pick ? ed.v : ed.u;
                if (node_alive[other]) --degree[other];
            }
            record(step);
        }
        return curve;
    }

    const std::vector<std::size_t> order =
        scenario.mode == FailureMode::random ? shuffled(total, scenario.seed) : custom_order(g, scenario);
    for (std::size_t k = 0; k < order.size(); ++k) {
        (nodes ? node_alive : edge_alive)[order[k]] = false;
        record(k + 1);
    }
    return curve;
}

double curve_area(std::span<const CurvePoint> curve) {
    double a = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        a += 0.5 * (curve[i].giant_fraction + curve[i - 1].giant_fraction) *
             (curve[i].fraction_removed - curve[i - 1].fraction_removed);
    return a;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
    out << "fraction_removed,giant_fraction\n";
    for (const auto& p : curve)
        out << csv::format_double(p.fraction_removed) << ',' << csv::format_double(p.giant_fraction) << '\n';
}

// ---- betweenness and cascades ----------------------------------------------------

Betweenness betweenness(const InfraGraph& g, const std::vector<bool>& node_alive,
                        const std::vector<bool>& edge_alive) {
    const std::size_t n = g.node_count();
    Betweenness bc{std::vector<double>(n, 0.0), std::vector<double>(g.edge_count(), 0.0)};
    std::vector<long> dist(n);
    std::vector<double> sigma(n), delta(n);
    std::vector<std::size_t> order;
    order.reserve(n);
    std::deque<std::size_t> queue;
    for (std::size_t s = 0; s < n; ++s) {
        if (!node_alive[s]) continue;
        std::fill(dist.begin(), dist.end(), -1L);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        order.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s);
        while (!queue.empty()) {
            const std::size_t v = queue.front();
            queue.pop_front();
            order.push_back(v);
            for (std::size_t e : g.incident(v)) {
                if (!edge_alive[e]) continue;
                const auto& ed = g.edge(e);
                const std::size_t w = ed.u == v ? ed.v : ed.u;
                if (!node_alive[w]) continue;
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
            }
        }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::size_t w = *it;
            for (std::size_t e : g.incident(w)) {
                if (!edge_alive[e]) continue;
                const auto& ed = g.edge(e);
                const std::size_t v = ed.u == w ? ed.v : ed.u;
                if (!node_alive[v] || dist[v] < 0 || dist[v] + 1 != dist[w]) continue;
                const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                bc.edge[e] += c;
                delta[v] += c;
            }
            if (w != s) bc.node[w] += delta[w];
        }
    }
    // every unordered pair was counted from both ends
    for (auto& x : bc.node) x *= 0.5;
    for (auto& x : bc.edge) x *= 0.5;
    return bc;
}

Betweenness betweenness(const InfraGraph& g) {
    return betweenness(g, std::vector<bool>(g.node_count(), true), std::vector<bool>(g.edge_count(), true));
}

CascadeResult cascade_simulate(const InfraGraph& g, std::span<const std::size_t> initial_failures, double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) throw InputError("cascade: capacity factor must be >= 1");
    const std::vector<bool> node_alive(g.node_count(), true);
    CascadeResult res;
    res.edge_alive.assign(g.edge_count(), true);

    const Betweenness initial = betweenness(g);
    std::vector<double> capacity(g.edge_count());
    for (std::size_t e = 0; e < g.edge_count(); ++e) capacity[e] = alpha * initial.edge[e];

    std::vector<std::size_t> first;
    for (std::size_t e : initial_failures) {
        if (e >= g.edge_count()) throw InputError("cascade: unknown edge " + std::to_string(e));
        if (res.edge_alive[e]) {
            res.edge_alive[e] = false;
            first.push_back(e);
        }
    }
    std::sort(first.begin(), first.end());
    res.timeline.push_back(std::move(first));

    for (;;) {
        const Betweenness load = betweenness(g, node_alive, res.edge_alive);
        std::vector<std::size_t> failing;
        for (std::size_t e = 0; e < g.edge_count(); ++e)
            if (res.edge_alive[e] && load.edge[e] > capacity[e] * (1.0 + 1e-9) + 1e-12) failing.push_back(e);
        if (failing.empty()) break;
        for (std::size_t e : failing) res.edge_alive[e] = false;
        res.timeline.push_back(std::move(failing));
        ++res.rounds;
    }

    const auto alive = static_cast<double>(std::count(res.edge_alive.begin(), res.edge_alive.end(), true));
    res.surviving_edge_fraction = g.edge_count() ? alive / static_cast<double>(g.edge_count()) : 1.0;
    res.giant_fraction = g.node_count() ? static_cast<double>(giant_component_size(g, node_alive, res.edge_alive)) /
                                              static_cast<double>(g.node_count())
                                        : 0.0;
    return res;
}

ChokePoints choke_points(const InfraGraph& g, std::size_t k) {
    if (k == 0) throw InputError("choke_points: k must be >= 1");
    const Betweenness bc = betweenness(g);
    ChokePoints out;
    for (std::size_t i = 0; i < g.node_count(); ++i) out.nodes.push_back({g.node(i).id, bc.node[i]});
    for (std::size_t e = 0; e < g.edge_count(); ++e) out.edges.push_back({std::to_string(e), bc.edge[e]});
    const auto by_score = [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        return natural_less(a.id, b.id);
    };
    // stable over index order, which is natural id order for both lists
    std::stable_sort(out.nodes.begin(), out.nodes.end(), by_score);
    std::stable_sort(out.edges.begin(), out.edges.end(), by_score);
    if (out.nodes.size() > k) out.nodes.resize(k);
    if (out.edges.size() > k) out.edges.resize(k);
    return out;
}

InfraGraph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
    if (m < 1 || n < m + 1) throw InputError("barabasi_albert: need m >= 1 and n >= m + 1");
    InfraGraph g;
    for (std::size_t i = 0; i < n; ++i) g.add_node(std::to_string(i));
    std::vector<std::size_t> ends;  // each node once per incident edge
    for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t j = i + 1; j <= m; ++j) {
            g.add_edge(std::to_string(i), std::to_string(j));
            ends.push_back(i);
            ends.push_back(j);
        }
    Rng rng(seed);
    for (std::size_t v = m + 1; v < n; ++v) {
        std::vector<std::size_t> targets;
        while (targets.size() < m) {
            const std::size_t t = ends[rng.below(ends.size())];
            if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
        }
        for (std::size_t t : targets) {
            g.add_edge(std::to_string(v), std::to_string(t));
            ends.push_back(v);
            ends.push_back(t);
        }
    }
    return g;
}

}  // namespace ucimon
