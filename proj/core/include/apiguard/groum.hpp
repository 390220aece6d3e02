#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace apiguard {

enum class NodeKind { Action, Control };
enum class ControlKind { If, Loop, Catch };
enum class EdgeType { Order, DataDep, LoopInclusion, ExceptionScope };

const char* to_string(NodeKind k);
const char* to_string(ControlKind k);
const char* to_string(EdgeType t);

struct Node {
    int id = 0;
    /// Action nodes: `Type.member` (constructors use `Type.<init>`).
    /// Control nodes: "IF", "LOOP", or the exception type name for CATCH.
    std::string label;
    NodeKind kind = NodeKind::Action;
    std::optional<ControlKind> control;

    bool operator==(const Node&) const = default;
};

struct Edge {
    int src = 0;
    int dst = 0;
    EdgeType type = EdgeType::Order;

    bool operator==(const Edge&) const = default;
    /// Canonical edge order: (type, src, dst).
    friend bool operator<(const Edge& a, const Edge& b) {
        if (a.type != b.type) return a.type < b.type;
        if (a.src != b.src) return a.src < b.src;
        return a.dst < b.dst;
    }
};

/// Directed labeled graph of API-usage actions and control points.
///
/// Invariants (checked by validate()): node ids dense 0..n-1, edge endpoints
/// exist, no self-loops, no duplicate (src, dst, type) triples, and the
/// Order-edge subgraph is acyclic.
struct Groum {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    /// Body region of each control node, recorded at build time: the Action
    /// node ids the control structure encloses. Used by pruning to decide
    /// whether a control node still governs a retained API action.
    std::map<int, std::vector<int>> regions;

    bool empty() const { return nodes.empty(); }
    const Node& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
    bool hasEdge(int src, int dst, EdgeType type) const;

    /// Throws InvalidGroum on any structural violation.
    void validate() const;

    /// Sorts nodes by id and edges by (type, src, dst) in place.
    void canonicalize();

    /// True iff the Order-edge subgraph has no cycle.
    bool orderAcyclic() const;

    /// dst reachable from src over Order edges (src == dst counts as reachable).
    bool orderReaches(int src, int dst) const;

    bool operator==(const Groum&) const = default;
};

/// Canonical text form: compact JSON, nodes sorted by id, edges sorted by
/// (type, src, dst). Bit-exact for equal groums; deserialize(serialize(g)) == g.
std::string serialize(const Groum& g);
Groum deserialize(const std::string& text);

/// Corpus form: top-level JSON array, one groum per element.
std::string serialize_corpus(const std::vector<Groum>& gs);
std::vector<Groum> deserialize_corpus(const std::string& text);

} // namespace apiguard
