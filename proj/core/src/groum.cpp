#include "apiguard/groum.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "apiguard/errors.hpp"

namespace apiguard {

using ordered_json = nlohmann::ordered_json;

const char* to_string(NodeKind k) {
    return k == NodeKind::Action ? "Action" : "Control";
}

const char* to_string(ControlKind k) {
    switch (k) {
    case ControlKind::If: return "IF";
    case ControlKind::Loop: return "LOOP";
    case ControlKind::Catch: return "CATCH";
    }
    return "?";
}

const char* to_string(EdgeType t) {
    switch (t) {
    case EdgeType::Order: return "Order";
    case EdgeType::DataDep: return "DataDep";
    case EdgeType::LoopInclusion: return "LoopInclusion";
    case EdgeType::ExceptionScope: return "ExceptionScope";
    }
    return "?";
}

bool Groum::hasEdge(int src, int dst, EdgeType type) const {
    return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
        return e.src == src && e.dst == dst && e.type == type;
    });
}

bool Groum::orderAcyclic() const {
    // Kahn over the Order subgraph.
    std::size_t n = nodes.size();
    std::vector<int> indeg(n, 0);
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : edges) {
        if (e.type != EdgeType::Order) continue;
        adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
        ++indeg[static_cast<std::size_t>(e.dst)];
    }
    std::vector<int> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) queue.push_back(static_cast<int>(i));
    std::size_t seen = 0;
    while (!queue.empty()) {
        int u = queue.back();
        queue.pop_back();
        ++seen;
        for (int v : adj[static_cast<std::size_t>(u)])
            if (--indeg[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
    }
    return seen == n;
}

bool Groum::orderReaches(int src, int dst) const {
    if (src == dst) return true;
    std::size_t n = nodes.size();
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : edges)
        if (e.type == EdgeType::Order) adj[static_cast<std::size_t>(e.src)].push_back(e.dst);
    std::vector<bool> visited(n, false);
    std::vector<int> stack{src};
    visited[static_cast<std::size_t>(src)] = true;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            if (v == dst) return true;
            if (!visited[static_cast<std::size_t>(v)]) {
                visited[static_cast<std::size_t>(v)] = true;
                stack.push_back(v);
            }
        }
    }
    return false;
}

void Groum::validate() const {
    int n = static_cast<int>(nodes.size());
    std::vector<bool> idSeen(nodes.size(), false);
    for (const Node& node : nodes) {
        if (node.id < 0 || node.id >= n)
            throw InvalidGroum("node id " + std::to_string(node.id) + " not dense in 0.." +
                               std::to_string(n - 1));
        if (idSeen[static_cast<std::size_t>(node.id)])
            throw InvalidGroum("duplicate node id " + std::to_string(node.id));
        idSeen[static_cast<std::size_t>(node.id)] = true;
        if ((node.kind == NodeKind::Control) != node.control.has_value())
            throw InvalidGroum("controlKind present iff kind is Control (node " +
                               std::to_string(node.id) + ")");
        if (node.label.empty()) throw InvalidGroum("empty node label");
    }
    std::set<std::tuple<int, int, int>> triples;
    for (const Edge& e : edges) {
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
            throw InvalidGroum("edge endpoint out of range");
        if (e.src == e.dst) throw InvalidGroum("self-loop on node " + std::to_string(e.src));
        if (!triples.insert({e.src, e.dst, static_cast<int>(e.type)}).second)
            throw InvalidGroum("duplicate edge (" + std::to_string(e.src) + ", " +
                               std::to_string(e.dst) + ", " + to_string(e.type) + ")");
    }
    for (const auto& [ctrl, actions] : regions) {
        if (ctrl < 0 || ctrl >= n || nodes[static_cast<std::size_t>(ctrl)].kind != NodeKind::Control)
            throw InvalidGroum("region owner " + std::to_string(ctrl) + " is not a control node");
        for (int a : actions)
            if (a < 0 || a >= n) throw InvalidGroum("region member out of range");
    }
    if (!orderAcyclic()) throw InvalidGroum("Order-edge subgraph has a cycle");
}

void Groum::canonicalize() {
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    std::sort(edges.begin(), edges.end());
    for (auto& [ctrl, actions] : regions) std::sort(actions.begin(), actions.end());
}

namespace {

NodeKind parse_kind(const std::string& s) {
    if (s == "Action") return NodeKind::Action;
    if (s == "Control") return NodeKind::Control;
    throw FormatError(0, "unknown node kind '" + s + "'");
}

ControlKind parse_control(const std::string& s) {
    if (s == "IF") return ControlKind::If;
    if (s == "LOOP") return ControlKind::Loop;
    if (s == "CATCH") return ControlKind::Catch;
    throw FormatError(0, "unknown controlKind '" + s + "'");
}

EdgeType parse_edge_type(const std::string& s) {
    if (s == "Order") return EdgeType::Order;
    if (s == "DataDep") return EdgeType::DataDep;
    if (s == "LoopInclusion") return EdgeType::LoopInclusion;
    if (s == "ExceptionScope") return EdgeType::ExceptionScope;
    throw FormatError(0, "unknown edge type '" + s + "'");
}

ordered_json groum_to_json(const Groum& input) {
    Groum g = input;
    g.canonicalize();
    ordered_json j;
    j["nodes"] = ordered_json::array();
    for (const Node& n : g.nodes) {
        ordered_json jn;
        jn["id"] = n.id;
        jn["label"] = n.label;
        jn["kind"] = to_string(n.kind);
        if (n.control) jn["controlKind"] = to_string(*n.control);
        j["nodes"].push_back(std::move(jn));
    }
    j["edges"] = ordered_json::array();
    for (const Edge& e : g.edges) {
        ordered_json je;
        je["type"] = to_string(e.type);
        je["src"] = e.src;
        je["dst"] = e.dst;
        j["edges"].push_back(std::move(je));
    }
    if (!g.regions.empty()) {
        j["regions"] = ordered_json::array();
        for (const auto& [ctrl, actions] : g.regions) {
            ordered_json jr;
            jr["control"] = ctrl;
            jr["actions"] = actions;
            j["regions"].push_back(std::move(jr));
        }
    }
    return j;
}

Groum groum_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("nodes") || !j.contains("edges"))
        throw FormatError(0, "groum must be an object with 'nodes' and 'edges'");
    Groum g;
    for (const auto& jn : j.at("nodes")) {
        Node n;
        n.id = jn.at("id").get<int>();
        n.label = jn.at("label").get<std::string>();
        n.kind = parse_kind(jn.at("kind").get<std::string>());
        if (jn.contains("controlKind")) n.control = parse_control(jn.at("controlKind").get<std::string>());
        g.nodes.push_back(std::move(n));
    }
    for (const auto& je : j.at("edges")) {
        Edge e;
        e.type = parse_edge_type(je.at("type").get<std::string>());
        e.src = je.at("src").get<int>();
        e.dst = je.at("dst").get<int>();
        g.edges.push_back(e);
    }
    if (j.contains("regions")) {
        for (const auto& jr : j.at("regions"))
            g.regions[jr.at("control").get<int>()] = jr.at("actions").get<std::vector<int>>();
    }
    g.canonicalize();
    try {
        g.validate();
    } catch (const InvalidGroum& e) {
        throw FormatError(0, e.what());
    }
    return g;
}

ordered_json parse_json(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw FormatError(e.byte, e.what());
    }
}

} // namespace

std::string serialize(const Groum& g) {
    return groum_to_json(g).dump();
}

Groum deserialize(const std::string& text) {
    try {
        return groum_from_json(parse_json(text));
    } catch (const ordered_json::exception& e) {
        throw FormatError(0, e.what());
    }
}

std::string serialize_corpus(const std::vector<Groum>& gs) {
    ordered_json arr = ordered_json::array();
    for (const Groum& g : gs) arr.push_back(groum_to_json(g));
    return arr.dump();
}

std::vector<Groum> deserialize_corpus(const std::string& text) {
    ordered_json arr = parse_json(text);
    if (!arr.is_array()) throw FormatError(0, "corpus must be a top-level array");
    std::vector<Groum> out;
    try {
        for (const auto& j : arr) out.push_back(groum_from_json(j));
    } catch (const ordered_json::exception& e) {
        throw FormatError(0, e.what());
    }
    return out;
}

} // namespace apiguard
