#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "apiguard/groum.hpp"

namespace apiguard::testsupport {

/// Independent element decomposition using counting maps instead of sorted
/// vectors. Kept deliberately naive: this is the reference the library's
/// implementation is checked against.
inline std::map<std::string, int> oracle_elements(const Groum& g) {
    std::map<std::string, int> counts;
    for (const Node& n : g.nodes) {
        std::string key = "N|" + n.label + "|" + to_string(n.kind);
        if (n.control) key += std::string("|") + to_string(*n.control);
        ++counts[key];
        if (n.kind == NodeKind::Control) {
            ++counts["C|" + std::string(to_string(*n.control))];
            if (*n.control == ControlKind::Catch) ++counts["X|" + n.label];
        }
    }
    for (const Edge& e : g.edges) {
        const std::string& src = g.nodes[static_cast<std::size_t>(e.src)].label;
        const std::string& dst = g.nodes[static_cast<std::size_t>(e.dst)].label;
        ++counts["E|" + std::string(to_string(e.type)) + "|" + src + "|" + dst];
    }
    return counts;
}

inline double oracle_sim(const Groum& a, const Groum& b) {
    auto ca = oracle_elements(a);
    auto cb = oracle_elements(b);
    long shared = 0, total = 0;
    std::set<std::string> keys;
    for (const auto& [k, v] : ca) keys.insert(k);
    for (const auto& [k, v] : cb) keys.insert(k);
    for (const std::string& k : keys) {
        int x = ca.count(k) ? ca.at(k) : 0;
        int y = cb.count(k) ? cb.at(k) : 0;
        shared += std::min(x, y);
        total += std::max(x, y);
    }
    if (total == 0) return 0.0;
    return static_cast<double>(shared) / static_cast<double>(total);
}

struct OracleDbscan {
    std::vector<std::set<std::string>> clusters;
    std::set<std::string> noise;
};

/// Brute-force density reachability: label propagation among core points to
/// a fixpoint, then the deterministic border rule (first core in the
/// lexicographic scan order that has the border point in range).
template <typename Dist>
OracleDbscan oracle_dbscan(std::vector<std::string> pts, Dist dist, double eps, int minPts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::size_t n = pts.size();

    auto inRange = [&](std::size_t i, std::size_t j) {
        return i == j || dist(pts[i], pts[j]) <= eps;
    };
    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        int count = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (inRange(i, j)) ++count;
        core[i] = count >= minPts;
    }

    // every core starts in its own cluster; merge until stable
    std::vector<int> label(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (core[i]) label[i] = static_cast<int>(i);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!core[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (!core[j] || !inRange(i, j)) continue;
                int m = std::min(label[i], label[j]);
                if (label[i] != m || label[j] != m) {
                    label[i] = label[j] = m;
                    changed = true;
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i] || label[i] >= 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (core[j] && inRange(j, i)) {
                label[i] = label[j];
                break;
            }
        }
    }

    OracleDbscan out;
    std::map<int, std::set<std::string>> byLabel;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] >= 0)
            byLabel[label[i]].insert(pts[i]);
        else
            out.noise.insert(pts[i]);
    }
    for (const auto& [l, members] : byLabel) out.clusters.push_back(members);
    return out;
}

} // namespace apiguard::testsupport
