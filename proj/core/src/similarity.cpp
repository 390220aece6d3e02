#include "apiguard/similarity.hpp"

#include <algorithm>

#include "apiguard/errors.hpp"

namespace apiguard {

ElementBag elements(const Groum& g) {
    ElementBag bag;
    bag.reserve(g.nodes.size() * 2 + g.edges.size());
    for (const Node& n : g.nodes) {
        std::string key = "N|" + n.label + "|" + to_string(n.kind);
        if (n.control) key += std::string("|") + to_string(*n.control);
        bag.push_back(std::move(key));
        if (n.kind == NodeKind::Control) {
            bag.push_back(std::string("C|") + to_string(*n.control));
            if (*n.control == ControlKind::Catch) bag.push_back("X|" + n.label);
        }
    }
    for (const Edge& e : g.edges) {
        const std::string& src = g.node(e.src).label;
        const std::string& dst = g.node(e.dst).label;
        bag.push_back(std::string("E|") + to_string(e.type) + "|" + src + "|" + dst);
    }
    std::sort(bag.begin(), bag.end());
    return bag;
}

double sim_bags(const ElementBag& a, const ElementBag& b) {
    if (a.empty() && b.empty()) return 0.0; // no usage evidence on either side
    // merge walk over the two sorted multisets
    std::size_t i = 0, j = 0, shared = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++shared;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    std::size_t unionSize = a.size() + b.size() - shared;
    return static_cast<double>(shared) / static_cast<double>(unionSize);
}

double sim(const Groum& a, const Groum& b) {
    return sim_bags(elements(a), elements(b));
}

double sim(const UsageSignature& a, const UsageSignature& b) {
    if (a.simple != b.simple) throw MixedVariant();
    return sim(a.groum, b.groum);
}

} // namespace apiguard
