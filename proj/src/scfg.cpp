#include "nocfg/scfg.hpp"

#include <sstream>
#include <stdexcept>

namespace nocfg {

Scfg build_scfg(std::span<const StatementNode> body, TypeId method)
{
    Scfg g;
    g.method = method;
    const auto n = static_cast<std::uint32_t>(body.size());
    g.entry = Vertex{0};
    g.exit = Vertex{n + 1};
    g.payload.reserve(n + 2);
    g.payload.emplace_back(std::nullopt);
    for (const auto &node : body)
        g.payload.emplace_back(node.id);
    g.payload.emplace_back(std::nullopt);
    for (std::uint32_t v = 0; v <= n; ++v)
        g.edges.emplace_back(Vertex{v}, Vertex{v + 1});
    g.edges.emplace_back(g.exit, g.entry);
    return g;
}

Vertex Scfg::successor(Vertex v) const
{
    // build_scfg lays edges out by source vertex.
    if (v.index < edges.size() && edges[v.index].first == v)
        return edges[v.index].second;
    for (const auto &[from, to] : edges)
        if (from == v)
            return to;
    throw std::logic_error("vertex without successor");
}

std::vector<NodeId> Scfg::order() const
{
    std::vector<NodeId> out;
    Vertex v = successor(entry);
    for (std::size_t guard = 0; v != entry && guard < vertex_count(); ++guard) {
        if (payload[v.index])
            out.push_back(*payload[v.index]);
        v = successor(v);
    }
    return out;
}

std::vector<ScfgViolation> validate_scfg(const Scfg &g)
{
    std::vector<ScfgViolation> out;
    const auto n = g.vertex_count();
    auto in_range = [&](Vertex v) { return v.index < n; };

    if (!in_range(g.entry) || !in_range(g.exit) || g.entry == g.exit) {
        out.push_back({1, g.entry, "entry and exit must be two distinct vertices of the graph"});
        return out;
    }
    if (g.payload[g.entry.index])
        out.push_back({1, g.entry, "entry vertex carries a statement"});
    if (g.payload[g.exit.index])
        out.push_back({1, g.exit, "exit vertex carries a statement"});

    std::vector<int> outdeg(n, 0), indeg(n, 0);
    std::vector<std::uint32_t> next(n, 0);
    for (const auto &[from, to] : g.edges) {
        if (!in_range(from) || !in_range(to)) {
            out.push_back({2, in_range(from) ? to : from, "edge endpoint outside the graph"});
            continue;
        }
        ++outdeg[from.index];
        ++indeg[to.index];
        next[from.index] = to.index;
    }
    bool degrees_ok = true;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (outdeg[v] != 1) {
            degrees_ok = false;
            out.push_back({2, Vertex{v}, "vertex has " + std::to_string(outdeg[v]) + " successors"});
        }
        if (indeg[v] != 1) {
            degrees_ok = false;
            out.push_back({2, Vertex{v}, "vertex has " + std::to_string(indeg[v]) + " predecessors"});
        }
    }

    for (std::uint32_t v = 0; v < n; ++v) {
        Vertex vx{v};
        if (vx != g.entry && vx != g.exit && !g.payload[v])
            out.push_back({3, vx, "vertex carries no statement"});
    }

    // The cycle structure is only defined once successors are a permutation.
    if (degrees_ok) {
        std::size_t steps = 0;
        std::uint32_t v = g.entry.index;
        do {
            v = next[v];
            ++steps;
        } while (v != g.entry.index && steps <= n);
        if (steps != n)
            out.push_back({4, g.entry, "cycle through entry covers " + std::to_string(steps) + " of " +
                                           std::to_string(n) + " vertices"});
    }
    return out;
}

static std::string escape(const std::string &text)
{
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

std::string scfg_to_dot(const Scfg &g, const Program &program)
{
    std::ostringstream os;
    os << "digraph \"" << escape(program.name_of(g.method)) << "\" {\n";
    os << "  node [shape=box];\n";
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v) {
        std::string label;
        if (Vertex{v} == g.entry)
            label = "entry";
        else if (Vertex{v} == g.exit)
            label = "exit";
        else if (g.payload[v]) {
            const auto *node = program.node(*g.payload[v]);
            label = node ? to_string(*node) : "?";
        }
        os << "  v" << v << " [label=\"" << escape(label) << "\"";
        if (Vertex{v} == g.entry || Vertex{v} == g.exit)
            os << ", shape=ellipse";
        os << "];\n";
    }
    for (const auto &[from, to] : g.edges)
        os << "  v" << from.index << " -> v" << to.index << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace nocfg
