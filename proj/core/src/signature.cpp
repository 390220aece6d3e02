#include "apiguard/signature.hpp"

#include <algorithm>
#include <map>

#include "apiguard/errors.hpp"

namespace apiguard {

namespace {

/// Reachability closure of the Order subgraph, as adjacency matrix.
std::vector<std::vector<bool>> order_closure(const Groum& g) {
    std::size_t n = g.nodes.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const Edge& e : g.edges)
        if (e.type == EdgeType::Order)
            reach[static_cast<std::size_t>(e.src)][static_cast<std::size_t>(e.dst)] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = true;
    return reach;
}

} // namespace

Groum prune(const Groum& input, const ApiSpec& spec, const std::string& sourceMethod) {
    Groum g = input;
    g.canonicalize();
    std::size_t n = g.nodes.size();

    std::vector<bool> retained(n, false);
    for (const Node& node : g.nodes)
        if (node.kind == NodeKind::Action && spec.matches(node.label))
            retained[static_cast<std::size_t>(node.id)] = true;

    // a control node survives iff it still governs a retained API action
    for (const Node& node : g.nodes) {
        if (node.kind != NodeKind::Control) continue;
        bool keep = false;
        for (const Edge& e : g.edges) {
            if (e.src != node.id) continue;
            if ((e.type == EdgeType::LoopInclusion || e.type == EdgeType::ExceptionScope) &&
                retained[static_cast<std::size_t>(e.dst)])
                keep = true;
        }
        auto region = g.regions.find(node.id);
        if (!keep && region != g.regions.end())
            for (int a : region->second)
                if (retained[static_cast<std::size_t>(a)]) keep = true;
        retained[static_cast<std::size_t>(node.id)] = keep;
    }

    std::size_t survivors = static_cast<std::size_t>(
        std::count(retained.begin(), retained.end(), true));
    if (survivors == 0) throw EmptySignature(sourceMethod);
    if (survivors == n) return g; // identity on fully-API graphs, ids preserved

    // old id -> new dense id, preserving relative order
    std::map<int, int> remap;
    for (std::size_t i = 0; i < n; ++i)
        if (retained[i]) remap[static_cast<int>(i)] = static_cast<int>(remap.size());

    Groum out;
    for (const Node& node : g.nodes)
        if (retained[static_cast<std::size_t>(node.id)])
            out.nodes.push_back(Node{remap[node.id], node.label, node.kind, node.control});

    // Order: transitive closure restricted to survivors, then transitive reduction
    auto reach = order_closure(g);
    std::vector<int> kept;
    for (std::size_t i = 0; i < n; ++i)
        if (retained[i]) kept.push_back(static_cast<int>(i));
    for (int u : kept) {
        for (int v : kept) {
            if (u == v || !reach[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) continue;
            bool redundant = false;
            for (int w : kept) {
                if (w == u || w == v) continue;
                if (reach[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] &&
                    reach[static_cast<std::size_t>(w)][static_cast<std::size_t>(v)]) {
                    redundant = true;
                    break;
                }
            }
            if (!redundant) out.edges.push_back(Edge{remap[u], remap[v], EdgeType::Order});
        }
    }

    for (const Edge& e : g.edges) {
        if (e.type == EdgeType::Order) continue;
        if (retained[static_cast<std::size_t>(e.src)] && retained[static_cast<std::size_t>(e.dst)])
            out.edges.push_back(Edge{remap[e.src], remap[e.dst], e.type});
    }

    for (const auto& [ctrl, actions] : g.regions) {
        if (!retained[static_cast<std::size_t>(ctrl)]) continue;
        std::vector<int> remapped;
        for (int a : actions)
            if (retained[static_cast<std::size_t>(a)]) remapped.push_back(remap[a]);
        if (!remapped.empty()) out.regions[remap[ctrl]] = std::move(remapped);
    }

    out.canonicalize();
    out.validate();
    return out;
}

UsageSignature extract_signature(const Groum& groum, const ApiSpec& spec,
                                 const std::string& sourceMethod) {
    UsageSignature sig;
    sig.groum = prune(groum, spec, sourceMethod);
    sig.apiName = spec.name;
    sig.sourceMethod = sourceMethod;
    sig.simple = false;
    return sig;
}

UsageSignature simplify(const UsageSignature& sig) {
    UsageSignature out = sig;
    if (out.simple) return out;
    std::erase_if(out.groum.edges, [](const Edge& e) { return e.type == EdgeType::DataDep; });
    out.simple = true;
    return out;
}

} // namespace apiguard
