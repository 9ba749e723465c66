#ifndef UCIMON_NETRISK_HPP
#define UCIMON_NETRISK_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ucimon/geo.hpp"

namespace ucimon {

/// Orders ids numerically when both are unsigned integers, otherwise
/// lexicographically; numeric ids sort before the rest.
bool natural_less(std::string_view a, std::string_view b);

struct InfraNode {
    std::string id;
    std::optional<GeoPoint> pos;
};

struct InfraEdge {
    std::size_t u = 0;
    std::size_t v = 0;
    std::string kind;
    double capacity = 1.0;
};

/// Undirected multigraph of landing stations and cable/pipe segments.
/// Nodes are indexed in natural id order; edges keep insertion order and
/// are identified by that index.
class InfraGraph {
public:
    InfraGraph() = default;

    /// Throws InputError on duplicate or empty ids.
    void add_node(std::string id, std::optional<GeoPoint> pos = std::nullopt);
    /// Endpoints must exist; throws InputError on self-loops or capacity <= 0.
    std::size_t add_edge(std::string_view src, std::string_view dst, std::string kind = "cable",
                         double capacity = 1.0);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const InfraNode& node(std::size_t i) const { return nodes_[i]; }
    const InfraEdge& edge(std::size_t e) const { return edges_[e]; }
    std::optional<std::size_t> node_index(std::string_view id) const;
    /// Edge indices incident to node i.
    const std::vector<std::size_t>& incident(std::size_t i) const { return adj_[i]; }

private:
    void reindex();

    std::vector<InfraNode> nodes_;
    std::vector<InfraEdge> edges_;
    std::vector<std::vector<std::size_t>> adj_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

/// Reads `src,dst,kind,capacity`; nodes come from `nodes_csv` (`id,lat,lon`)
/// when given, otherwise from the edge endpoints.
InfraGraph read_graph_csv(std::istream& edges_csv, std::istream* nodes_csv = nullptr);
InfraGraph load_graph(const std::filesystem::path& edges, const std::optional<std::filesystem::path>& nodes);
void write_graph_csv(std::ostream& edges_csv, const InfraGraph& g);

enum class FailureMode { random, degree_targeted, custom };
enum class FailureTarget { nodes, edges };

std::string_view to_string(FailureMode m);
std::optional<FailureMode> failure_mode_from_string(std::string_view s);

struct FailureScenario {
    FailureMode mode = FailureMode::random;
    FailureTarget target = FailureTarget::nodes;
    std::uint64_t seed = 0;
    /// custom mode: node ids, or edge indices in decimal
    std::vector<std::string> order;
};

struct CurvePoint {
    double fraction_removed = 0.0;
    double giant_fraction = 0.0;
};

/// Size of the largest connected component over the surviving elements.
std::size_t giant_component_size(const InfraGraph& g, const std::vector<bool>& node_alive,
                                 const std::vector<bool>& edge_alive);

/// Removes elements one at a time and records the largest component's share
/// of the original node count. The curve starts at fraction 0 with the
/// intact graph. Random mode shuffles with the seed; degree_targeted removes
/// the node of highest current degree (ties to the smallest id) and applies
/// to nodes only. Fractions are over the original node or edge count.
/// Throws InputError on an empty graph or bad custom ids.
std::vector<CurvePoint> robustness_curve(const InfraGraph& g, const FailureScenario& scenario);

/// Trapezoid area under a curve.
double curve_area(std::span<const CurvePoint> curve);

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

struct Betweenness {
    std::vector<double> node;
    std::vector<double> edge;
};

/// Unweighted shortest-path betweenness over unordered node pairs. Parallel
/// edges are distinct paths and split the pair's flow.
Betweenness betweenness(const InfraGraph& g, const std::vector<bool>& node_alive,
                        const std::vector<bool>& edge_alive);
Betweenness betweenness(const InfraGraph& g);

struct CascadeResult {
    std::vector<std::vector<std::size_t>> timeline;  // edges failing per round; round 0 holds the initial set
    std::size_t rounds = 0;                          // overload rounds after the initial failures
    double surviving_edge_fraction = 1.0;
    double giant_fraction = 1.0;
    std::vector<bool> edge_alive;
};

/// Motter-Lai overload cascade on edges. Initial loads are edge
/// betweenness, capacities alpha times that. After the initial removal,
/// loads are recomputed on the surviving graph and every edge whose load
/// exceeds its capacity (relative tolerance 1e-9) fails together; repeated
/// until nothing fails. Throws InputError for alpha < 1 or unknown edges.
CascadeResult cascade_simulate(const InfraGraph& g, std::span<const std::size_t> initial_failures, double alpha);

struct Ranked {
    std::string id;  // node id, or edge index in decimal
    double score = 0.0;
};

struct ChokePoints {
    std::vector<Ranked> nodes;
    std::vector<Ranked> edges;
};

/// Top-k nodes and edges by betweenness, ties to the smaller id.
ChokePoints choke_points(const InfraGraph& g, std::size_t k);

/// Preferential-attachment graph: a clique on m + 1 nodes, then each new
/// node links to m distinct earlier nodes chosen with probability
/// proportional to degree. Node ids are "0" .. "n-1".
InfraGraph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace ucimon

#endif  // UCIMON_NETRISK_HPP
