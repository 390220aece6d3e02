#include "apiguard/detection.hpp"

#include <algorithm>

#include "apiguard/errors.hpp"
#include "apiguard/similarity.hpp"

namespace apiguard {

const char* to_string(RiskStrategy s) {
    return s == RiskStrategy::Max ? "max" : "noisy-or";
}

RiskStrategy risk_strategy_from_string(const std::string& s) {
    if (s == "max") return RiskStrategy::Max;
    if (s == "noisy-or") return RiskStrategy::NoisyOr;
    throw ConfigError("unknown risk strategy '" + s + "' (max|noisy-or)");
}

double risk_max(const std::vector<double>& sims) {
    double best = 0.0;
    for (double s : sims) best = std::max(best, s);
    return best;
}

double risk_noisy_or(const std::vector<double>& sims) {
    double miss = 1.0;
    for (double s : sims) miss *= 1.0 - s;
    return 1.0 - miss;
}

RiskReport score_candidate(const UsageSignature& candidate, const DetectorSet& detectors,
                           bool detectorsSimple, RiskStrategy strategy) {
    if (candidate.simple != detectorsSimple) throw MixedVariant();
    RiskReport r;
    r.method = candidate.sourceMethod;
    r.strategy = strategy;
    ElementBag bag = elements(candidate.groum);
    r.perDetectorSims.reserve(detectors.size());
    for (const Detector& d : detectors.detectors)
        r.perDetectorSims.push_back(sim_bags(bag, d.bag));
    r.score = strategy == RiskStrategy::Max ? risk_max(r.perDetectorSims)
                                            : risk_noisy_or(r.perDetectorSims);
    return r;
}

std::vector<RiskReport> rank(const std::vector<UsageSignature>& candidates,
                             const DetectorSet& detectors, bool detectorsSimple,
                             RiskStrategy strategy) {
    std::vector<RiskReport> reports;
    reports.reserve(candidates.size());
    for (const UsageSignature& c : candidates)
        reports.push_back(score_candidate(c, detectors, detectorsSimple, strategy));
    std::stable_sort(reports.begin(), reports.end(), [](const RiskReport& a, const RiskReport& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.method < b.method;
    });
    for (std::size_t i = 0; i < reports.size(); ++i) reports[i].rank = static_cast<int>(i) + 1;
    return reports;
}

} // namespace apiguard
