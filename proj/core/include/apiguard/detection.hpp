#pragma once

#include <string>
#include <vector>

#include "apiguard/detector.hpp"
#include "apiguard/signature.hpp"

namespace apiguard {

enum class RiskStrategy { Max, NoisyOr };

const char* to_string(RiskStrategy s);
RiskStrategy risk_strategy_from_string(const std::string& s);

/// Risk of one candidate signature against a detector set.
struct RiskReport {
    std::string method;
    double score = 0.0;
    /// Similarity with each detector, in set order.
    std::vector<double> perDetectorSims;
    RiskStrategy strategy = RiskStrategy::Max;
    /// 1-based rank after sorting; 0 until rank() assigns it.
    int rank = 0;
};

/// max of the per-detector similarities; 0 for an empty vector.
double risk_max(const std::vector<double>& sims);

/// 1 - prod(1 - s_i): the probability that at least one detector fires,
/// treating similarities as independent match probabilities.
double risk_noisy_or(const std::vector<double>& sims);

/// Scores one candidate. Throws MixedVariant when the candidate's variant
/// differs from the detectors' variant.
RiskReport score_candidate(const UsageSignature& candidate, const DetectorSet& detectors,
                           bool detectorsSimple, RiskStrategy strategy);

/// Scores every candidate and sorts by score descending, ties broken by
/// method name ascending; assigns 1-based ranks.
std::vector<RiskReport> rank(const std::vector<UsageSignature>& candidates,
                             const DetectorSet& detectors, bool detectorsSimple,
                             RiskStrategy strategy);

} // namespace apiguard
