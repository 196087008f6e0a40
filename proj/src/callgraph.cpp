#include "nocfg/callgraph.hpp"

#include <json.hpp>

#include <cstdio>
#include <deque>
#include <sstream>

namespace nocfg {

using nlohmann::json;

void CallGraph::add_node(const std::string &method) { nodes_.insert(method); }

void CallGraph::add_edge(const std::string &caller, const std::string &callee, std::optional<CallSite> site)
{
    nodes_.insert(caller);
    nodes_.insert(callee);
    auto &sites = edges_[Edge{caller, callee}];
    if (site)
        sites.insert(*site);
}

void CallGraph::merge(const CallGraph &other)
{
    nodes_.insert(other.nodes_.begin(), other.nodes_.end());
    for (const auto &[edge, sites] : other.edges_)
        edges_[edge].insert(sites.begin(), sites.end());
}

std::set<Edge> CallGraph::edge_set() const
{
    std::set<Edge> out;
    for (const auto &entry : edges_)
        out.insert(entry.first);
    return out;
}

bool CallGraph::has_edge(const std::string &caller, const std::string &callee) const
{
    return edges_.contains(Edge{caller, callee});
}

std::vector<std::string> CallGraph::successors(const std::string &method) const
{
    std::vector<std::string> out;
    for (auto it = edges_.lower_bound(Edge{method, ""}); it != edges_.end() && it->first.caller == method; ++it)
        out.push_back(it->first.callee);
    return out;
}

static std::string dot_quote(const std::string &s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string to_dot(const CallGraph &g)
{
    std::ostringstream os;
    os << "digraph callgraph {\n";
    for (const auto &n : g.nodes())
        os << "  " << dot_quote(n) << " [label=" << dot_quote(n) << "];\n";
    for (const auto &[edge, sites] : g.edges())
        os << "  " << dot_quote(edge.caller) << " -> " << dot_quote(edge.callee) << ";\n";
    os << "}\n";
    return os.str();
}

std::string to_json(const CallGraph &g)
{
    json edges = json::array();
    for (const auto &[edge, sites] : g.edges()) {
        json js = json::array();
        for (const auto &site : sites) {
            json s = {{"line", site.line}};
            if (site.node)
                s["node"] = *site.node;
            js.push_back(std::move(s));
        }
        edges.push_back({{"caller", edge.caller}, {"callee", edge.callee}, {"sites", std::move(js)}});
    }
    json doc = {{"nodes", g.nodes()}, {"edges", std::move(edges)}};
    return doc.dump(2) + "\n";
}

namespace {

const json &require(const json &obj, const char *key, json::value_t type, const char *what)
{
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(std::string(what) + ": missing '" + key + "'");
    bool ok = it->type() == type ||
              (type == json::value_t::number_integer && it->type() == json::value_t::number_unsigned);
    if (!ok)
        throw SchemaError(std::string(what) + ": '" + key + "' has the wrong type");
    return *it;
}

} // namespace

CallGraph call_graph_from_json(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object())
        throw SchemaError("call graph: top level must be an object");
    CallGraph g;
    for (const auto &n : require(doc, "nodes", json::value_t::array, "call graph")) {
        if (!n.is_string())
            throw SchemaError("call graph: node names must be strings");
        g.add_node(n.get<std::string>());
    }
    for (const auto &e : require(doc, "edges", json::value_t::array, "call graph")) {
        if (!e.is_object())
            throw SchemaError("edge: must be an object");
        auto caller = require(e, "caller", json::value_t::string, "edge").get<std::string>();
        auto callee = require(e, "callee", json::value_t::string, "edge").get<std::string>();
        if (!g.nodes().contains(caller) || !g.nodes().contains(callee))
            throw SchemaError("edge " + caller + " -> " + callee + ": endpoint not listed in nodes");
        g.add_edge(caller, callee);
        if (!e.contains("sites"))
            continue;
        for (const auto &s : require(e, "sites", json::value_t::array, "edge")) {
            if (!s.is_object())
                throw SchemaError("site: must be an object");
            CallSite site;
            site.line = require(s, "line", json::value_t::number_integer, "site").get<int>();
            if (s.contains("node"))
                site.node = require(s, "node", json::value_t::number_integer, "site").get<std::uint32_t>();
            g.add_edge(caller, callee, site);
        }
    }
    return g;
}

ComparisonReport compare(const CallGraph &static_graph, const CallGraph &dynamic_graph)
{
    ComparisonReport r;
    auto s = static_graph.edge_set();
    auto d = dynamic_graph.edge_set();
    for (const auto &e : s)
        (d.contains(e) ? r.matched_edges : r.over_approx_edges).push_back(e);
    for (const auto &e : d)
        if (!s.contains(e))
            r.missed_edges.push_back(e);
    r.matched = r.matched_edges.size();
    r.over_approx = r.over_approx_edges.size();
    r.missed = r.missed_edges.size();
    auto ratio = [](std::size_t num, std::size_t den) { return den == 0 ? 1.0 : double(num) / double(den); };
    r.precision = ratio(r.matched, r.matched + r.over_approx);
    r.recall = ratio(r.matched, r.matched + r.missed);
    return r;
}

std::string format_percent(double ratio)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", ratio * 100.0);
    return buf;
}

std::string report_to_table(const ComparisonReport &r)
{
    std::ostringstream os;
    os << "matched      " << r.matched << "\n"
       << "over_approx  " << r.over_approx << "\n"
       << "missed       " << r.missed << "\n"
       << "precision    " << format_percent(r.precision) << "%\n"
       << "recall       " << format_percent(r.recall) << "%\n";
    auto list = [&](const char *title, const std::vector<Edge> &edges) {
        if (edges.empty())
            return;
        os << "\n" << title << ":\n";
        for (const auto &e : edges)
            os << "  " << e.caller << " -> " << e.callee << "\n";
    };
    list("over-approximated edges", r.over_approx_edges);
    list("missed edges", r.missed_edges);
    return os.str();
}

std::string report_to_json(const ComparisonReport &r)
{
    auto edges = [](const std::vector<Edge> &list) {
        json out = json::array();
        for (const auto &e : list)
            out.push_back({{"caller", e.caller}, {"callee", e.callee}});
        return out;
    };
    json doc = {
        {"matched", r.matched},
        {"over_approx", r.over_approx},
        {"missed", r.missed},
        {"precision", format_percent(r.precision)},
        {"recall", format_percent(r.recall)},
        {"matched_edges", edges(r.matched_edges)},
        {"over_approx_edges", edges(r.over_approx_edges)},
        {"missed_edges", edges(r.missed_edges)},
    };
    return doc.dump(2) + "\n";
}

std::optional<std::vector<std::string>> reachable(const CallGraph &g, const std::set<std::string> &sources,
                                                  const std::set<std::string> &targets)
{
    std::map<std::string, std::string> parent;
    std::deque<std::string> queue;
    for (const auto &s : sources) {
        parent.emplace(s, s);
        queue.push_back(s);
    }
    while (!queue.empty()) {
        auto current = queue.front();
        queue.pop_front();
        if (targets.contains(current)) {
            std::vector<std::string> path{current};
            while (parent.at(path.back()) != path.back())
                path.push_back(parent.at(path.back()));
            return std::vector<std::string>(path.rbegin(), path.rend());
        }
        for (const auto &next : g.successors(current))
            if (parent.emplace(next, current).second)
                queue.push_back(next);
    }
    return std::nullopt;
}

} // namespace nocfg
