#include "apiguard/clustering.hpp"

#include <algorithm>

#include "apiguard/errors.hpp"

namespace apiguard {

CoUsageIndex CoUsageIndex::build(const SelfCorpus& corpus) {
    CoUsageIndex idx;
    for (const UsageSignature& sig : corpus.signatures)
        for (const Node& n : sig.groum.nodes)
            if (n.kind == NodeKind::Action) idx.clientsOf[n.label].insert(sig.sourceMethod);
    return idx;
}

double co_usage_distance(const std::string& m1, const std::string& m2, const CoUsageIndex& idx) {
    auto it1 = idx.clientsOf.find(m1);
    auto it2 = idx.clientsOf.find(m2);
    if (it1 == idx.clientsOf.end()) throw UnknownMethod(m1);
    if (it2 == idx.clientsOf.end()) throw UnknownMethod(m2);
    const auto& a = it1->second;
    const auto& b = it2->second;
    std::size_t shared = 0;
    for (const std::string& c : a) shared += b.count(c);
    std::size_t unionSize = a.size() + b.size() - shared;
    if (unionSize == 0) return 1.0;
    return 1.0 - static_cast<double>(shared) / static_cast<double>(unionSize);
}

DbscanResult dbscan(const std::vector<std::string>& points,
                    const std::function<double(const std::string&, const std::string&)>& dist,
                    double eps, int minPts) {
    std::vector<std::string> pts = points;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::size_t n = pts.size();

    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i == j || dist(pts[i], pts[j]) <= eps) neighbors[i].push_back(j);

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i)
        core[i] = static_cast<int>(neighbors[i].size()) >= minPts;

    // clusters = density-connected components of core points, discovered in
    // scan order; BFS over core-to-core neighborhood links
    std::vector<int> clusterOf(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i] || clusterOf[i] >= 0) continue;
        int cid = next++;
        std::vector<std::size_t> queue{i};
        clusterOf[i] = cid;
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.erase(queue.begin());
            for (std::size_t v : neighbors[u]) {
                if (!core[v] || clusterOf[v] >= 0) continue;
                clusterOf[v] = cid;
                queue.push_back(v);
            }
        }
    }

    // border points join the cluster of the first core in scan order that
    // has them in range
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i] || clusterOf[i] >= 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (!core[j]) continue;
            if (std::find(neighbors[j].begin(), neighbors[j].end(), i) != neighbors[j].end()) {
                clusterOf[i] = clusterOf[j];
                break;
            }
        }
    }

    DbscanResult result;
    result.clusters.resize(static_cast<std::size_t>(next));
    for (std::size_t i = 0; i < n; ++i) {
        if (clusterOf[i] >= 0)
            result.clusters[static_cast<std::size_t>(clusterOf[i])].insert(pts[i]);
        else
            result.noise.insert(pts[i]);
    }
    return result;
}

std::vector<ScenarioCluster> derive_clusters(const SelfCorpus& corpus, double eps, int minPts) {
    CoUsageIndex idx = CoUsageIndex::build(corpus);
    std::vector<std::string> methods;
    for (const auto& [m, clients] : idx.clientsOf) methods.push_back(m);

    DbscanResult db = dbscan(
        methods, [&](const std::string& a, const std::string& b) { return co_usage_distance(a, b, idx); },
        eps, minPts);

    std::vector<std::set<std::string>> groups = db.clusters;

    if (!db.noise.empty()) {
        // keep noise methods only when some client would otherwise be lost
        bool orphaned = false;
        for (const UsageSignature& sig : corpus.signatures) {
            bool allNoise = true;
            bool anyMethod = false;
            for (const Node& n : sig.groum.nodes) {
                if (n.kind != NodeKind::Action) continue;
                anyMethod = true;
                if (!db.noise.count(n.label)) allNoise = false;
            }
            if (anyMethod && allNoise) orphaned = true;
        }
        if (orphaned) groups.push_back(db.noise);
    }

    std::vector<ScenarioCluster> out;
    if (groups.empty()) {
        // the single-cluster degenerate case: the whole corpus together
        ScenarioCluster all;
        all.id = 0;
        for (const auto& [m, clients] : idx.clientsOf) all.apiMethods.insert(m);
        all.clientSignatures = corpus.signatures;
        out.push_back(std::move(all));
        return out;
    }

    for (std::size_t i = 0; i < groups.size(); ++i) {
        ScenarioCluster c;
        c.id = static_cast<int>(i);
        c.apiMethods = groups[i];
        for (const UsageSignature& sig : corpus.signatures) {
            bool uses = std::any_of(sig.groum.nodes.begin(), sig.groum.nodes.end(),
                                    [&](const Node& n) {
                                        return n.kind == NodeKind::Action && c.apiMethods.count(n.label);
                                    });
            if (uses) c.clientSignatures.push_back(sig);
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace apiguard
