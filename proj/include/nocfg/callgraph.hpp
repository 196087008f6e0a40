#pragma once

// Method-level call graphs with per-edge call-site provenance, their JSON and
// DOT encodings, static-vs-dynamic comparison and reachability queries.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nocfg {

/// Where a call was observed. Static sites know the statement node; dynamic
/// sites may only know the source line.
struct CallSite {
    std::optional<std::uint32_t> node;
    int line = 0;
    friend auto operator<=>(const CallSite &, const CallSite &) = default;
};

struct Edge {
    std::string caller;
    std::string callee;
    friend auto operator<=>(const Edge &, const Edge &) = default;
};

/// Nodes and edge endpoints are qualified method names, so graphs produced
/// from different Program instances (or read back from JSON) compare directly.
class CallGraph {
public:
    void add_node(const std::string &method);
    /// Idempotent; sites accumulate as a set.
    void add_edge(const std::string &caller, const std::string &callee, std::optional<CallSite> site = std::nullopt);
    void merge(const CallGraph &other);

    const std::set<std::string> &nodes() const { return nodes_; }
    const std::map<Edge, std::set<CallSite>> &edges() const { return edges_; }
    std::set<Edge> edge_set() const;
    bool has_edge(const std::string &caller, const std::string &callee) const;
    std::size_t edge_count() const { return edges_.size(); }
    /// Outgoing neighbours in name order.
    std::vector<std::string> successors(const std::string &method) const;

    friend bool operator==(const CallGraph &, const CallGraph &) = default;

private:
    std::set<std::string> nodes_;
    std::map<Edge, std::set<CallSite>> edges_;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string to_dot(const CallGraph &graph);
/// Deterministic: sorted keys, sorted nodes, sorted edges and sites.
std::string to_json(const CallGraph &graph);
/// Throws SchemaError on anything that is not a call-graph document.
CallGraph call_graph_from_json(std::string_view text);

struct ComparisonReport {
    std::size_t matched = 0;
    std::size_t over_approx = 0;
    std::size_t missed = 0;
    double precision = 1.0;
    double recall = 1.0;
    std::vector<Edge> matched_edges;
    std::vector<Edge> over_approx_edges;
    std::vector<Edge> missed_edges;
};

ComparisonReport compare(const CallGraph &static_graph, const CallGraph &dynamic_graph);

/// Ratio as a percentage with two decimals, e.g. 0.83333 -> "83.33".
std::string format_percent(double ratio);
std::string report_to_table(const ComparisonReport &report);
std::string report_to_json(const ComparisonReport &report);

/// Shortest caller-to-callee path from any source to any target. Ties are
/// broken by name order, so the answer is deterministic.
std::optional<std::vector<std::string>> reachable(const CallGraph &graph, const std::set<std::string> &sources,
                                                  const std::set<std::string> &targets);

} // namespace nocfg
