#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apiguard/detection.hpp"
#include "apiguard/detector.hpp"
#include "apiguard/rng.hpp"
#include "apiguard/signature.hpp"

namespace apiguard {

enum class CaseLabel { GoodUse, Misuse };

enum class MisuseKind {
    MissingCall,
    MissingExceptionHandling,
    MissingConditionOrState,
    SwappedOrder,
};

const char* to_string(CaseLabel l);
const char* to_string(MisuseKind k);
MisuseKind misuse_kind_from_string(const std::string& s);

struct LabeledCase {
    UsageSignature signature;
    CaseLabel label = CaseLabel::GoodUse;
    /// Present iff label == Misuse.
    std::optional<MisuseKind> misuseKind;
};

/// Damages a correct signature to create a synthetic misuse. The result
/// always differs from the input. Throws Inapplicable when the signature
/// lacks the structure the kind needs.
LabeledCase inject_misuse(const UsageSignature& sig, MisuseKind kind, Rng& rng);

struct Fold {
    std::vector<LabeledCase> train; // good uses only
    std::vector<LabeledCase> test;  // balanced: fold goods + equal misuses
};

/// Partitions the good uses into k near-equal folds by seeded shuffle; each
/// test set pairs one fold's goods with an equal count of (disjointly drawn)
/// misuses, the train set holds the remaining goods. Throws TooFewCases when
/// k < 2, a fold would be empty, or misuses run out.
std::vector<Fold> kfold_split(const std::vector<LabeledCase>& corpus, int k, std::uint64_t seed);

/// Fraction of true misuses among the top-k ranked reports.
double precision_at_k(const std::vector<RiskReport>& ranked,
                      const std::map<std::string, CaseLabel>& labels, int k);

/// Fraction of all test misuses recovered within the top-k.
double recall_at_k(const std::vector<RiskReport>& ranked,
                   const std::map<std::string, CaseLabel>& labels, int k);

struct PipelineConfig {
    GenerationStrategy strategy = GenerationStrategy::Global;
    bool simpleGroums = false;
    RiskStrategy risk = RiskStrategy::Max;
    GAConfig ga;
    int folds = 10;
    std::uint64_t seed = 0;
};

struct FoldResult {
    std::map<int, double> precisionAtK;
    std::map<int, double> recallAtK;
    /// raw top-k hit counts, for exact metric recomputation
    std::map<int, int> hitsAtK;
    int misuses = 0;
    int testSize = 0;
    std::vector<RiskReport> ranked;
};

struct CvResult {
    std::vector<FoldResult> perFold;
    std::map<int, double> meanPrecisionAtK;
    std::map<int, double> meanRecallAtK;
    PipelineConfig config;
};

/// Guards one fold: every test signature must be absent from the train set
/// (by source method). Throws LeakError.
void check_no_leak(const Fold& fold);

/// Runs detector generation on the fold's train goods and scores its test
/// set; k defaults to {10%, 30%} of the test size (at least 1).
FoldResult run_fold(const Fold& fold, const ApiSpec& api, const PipelineConfig& cfg,
                    std::uint64_t foldSeed);

/// Full k-fold cross-validation. Deterministic in cfg.seed; folds may run on
/// parallel workers (cfg.ga.jobs) with per-fold RNG streams.
CvResult run_cv(const std::vector<LabeledCase>& corpus, const ApiSpec& api,
                const PipelineConfig& cfg);

/// One-sided binomial tail P[X >= successes] for X ~ Binomial(trials, p0).
double binomial_sf(int successes, int trials, double p0);

} // namespace apiguard
