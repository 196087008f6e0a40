#pragma once

// Simplified control-flow graph: a method's flat statements on one simple
// cycle entry -> s1 -> ... -> sn -> exit -> entry.

#include "nocfg/ir.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nocfg {

/// Position of a vertex within one Scfg.
struct Vertex {
    std::uint32_t index = 0;
    friend auto operator<=>(const Vertex &, const Vertex &) = default;
};

struct Scfg {
    TypeId method;
    Vertex entry;
    Vertex exit;
    /// Statement carried by each vertex; entry and exit carry none.
    std::vector<std::optional<NodeId>> payload;
    /// Intraprocedural control edges.
    std::vector<std::pair<Vertex, Vertex>> edges;

    std::size_t vertex_count() const { return payload.size(); }
    /// The unique successor. Only valid on a graph that passed validation.
    Vertex successor(Vertex v) const;
    /// Statement ids in cycle order starting after entry.
    std::vector<NodeId> order() const;
};

struct ScfgViolation {
    int property; // 1..4, numbered as in the SCFG definition
    Vertex vertex;
    std::string message;
};

Scfg build_scfg(std::span<const StatementNode> body, TypeId method);

/// Empty iff the graph has a single payload-free entry and exit, every vertex
/// has exactly one predecessor and one successor, every other vertex carries a
/// statement, and the vertices form one simple cycle.
std::vector<ScfgViolation> validate_scfg(const Scfg &graph);

/// Graphviz rendering; labels are the statements' source text.
std::string scfg_to_dot(const Scfg &graph, const Program &program);

} // namespace nocfg
