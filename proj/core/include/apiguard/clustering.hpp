#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "apiguard/signature.hpp"

namespace apiguard {

/// apiMethod -> client methods that call it, derived from a SelfCorpus.
struct CoUsageIndex {
    std::map<std::string, std::set<std::string>> clientsOf;

    static CoUsageIndex build(const SelfCorpus& corpus);
};

/// A family of API usage scenarios: a group of co-used API methods plus
/// every client signature touching the group.
struct ScenarioCluster {
    int id = 0;
    std::set<std::string> apiMethods;
    std::vector<UsageSignature> clientSignatures;
};

/// 1 - Jaccard of the two methods' client sets. Throws UnknownMethod.
double co_usage_distance(const std::string& m1, const std::string& m2, const CoUsageIndex& idx);

struct DbscanResult {
    std::vector<std::set<std::string>> clusters;
    std::set<std::string> noise;
};

/// Deterministic DBSCAN. Core point iff >= minPts neighbors within eps
/// (inclusive, counting itself). Border points attach to the cluster of
/// the first core discovered under the lexicographic scan order.
DbscanResult dbscan(const std::vector<std::string>& points,
                    const std::function<double(const std::string&, const std::string&)>& dist,
                    double eps, int minPts);

/// Full pipeline: co-usage distance + dbscan(eps = 0.8, minPts = 2), then
/// client assignment. Each client joins every cluster containing at least
/// one API method it calls. Noise methods form a residual cluster iff some
/// client uses only noise methods; zero clusters degenerate to a single
/// cluster holding the whole corpus.
std::vector<ScenarioCluster> derive_clusters(const SelfCorpus& corpus, double eps = 0.8,
                                             int minPts = 2);

} // namespace apiguard
