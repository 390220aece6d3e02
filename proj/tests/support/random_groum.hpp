#pragma once

#include <string>
#include <vector>

#include "apiguard/groum.hpp"
#include "apiguard/rng.hpp"

namespace apiguard::testsupport {

inline const std::vector<std::string>& default_labels() {
    static const std::vector<std::string> labels = {
        "Reader.<init>", "Reader.read",  "Reader.close",  "Writer.<init>",
        "Writer.write",  "Writer.flush", "Stream.open",   "Stream.next",
    };
    return labels;
}

inline const std::vector<std::string>& default_exceptions() {
    static const std::vector<std::string> types = {"IOException", "TimeoutError"};
    return types;
}

/// Random valid groum: node ids form a topological order for Order edges,
/// so acyclicity holds by construction.
inline Groum random_groum(Rng& rng, int maxActions = 6) {
    Groum g;
    int nActions = 1 + static_cast<int>(rng.nextIndex(static_cast<std::size_t>(maxActions)));
    const auto& labels = default_labels();
    for (int i = 0; i < nActions; ++i)
        g.nodes.push_back(Node{i, labels[rng.nextIndex(labels.size())], NodeKind::Action, std::nullopt});

    int nControls = static_cast<int>(rng.nextIndex(3));
    for (int c = 0; c < nControls; ++c) {
        int id = static_cast<int>(g.nodes.size());
        switch (rng.nextIndex(3)) {
        case 0: g.nodes.push_back(Node{id, "IF", NodeKind::Control, ControlKind::If}); break;
        case 1: g.nodes.push_back(Node{id, "LOOP", NodeKind::Control, ControlKind::Loop}); break;
        default:
            g.nodes.push_back(Node{id, default_exceptions()[rng.nextIndex(default_exceptions().size())],
                                   NodeKind::Control, ControlKind::Catch});
        }
    }

    int n = static_cast<int>(g.nodes.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.nextBool(0.35)) g.edges.push_back(Edge{i, j, EdgeType::Order});
            if (rng.nextBool(0.15)) g.edges.push_back(Edge{i, j, EdgeType::DataDep});
        }
    }
    for (const Node& node : g.nodes) {
        if (node.kind != NodeKind::Control) continue;
        std::vector<int> members;
        for (int a = 0; a < nActions; ++a) {
            if (!rng.nextBool(0.3)) continue;
            members.push_back(a);
            if (*node.control == ControlKind::Loop &&
                !g.hasEdge(node.id, a, EdgeType::LoopInclusion))
                g.edges.push_back(Edge{node.id, a, EdgeType::LoopInclusion});
            if (*node.control == ControlKind::Catch &&
                !g.hasEdge(node.id, a, EdgeType::ExceptionScope))
                g.edges.push_back(Edge{node.id, a, EdgeType::ExceptionScope});
        }
        if (!members.empty()) g.regions[node.id] = members;
    }
    g.canonicalize();
    g.validate();
    return g;
}

} // namespace apiguard::testsupport
