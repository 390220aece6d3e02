#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "apiguard/clustering.hpp"
#include "apiguard/groum.hpp"
#include "apiguard/rng.hpp"
#include "apiguard/signature.hpp"
#include "apiguard/similarity.hpp"

namespace apiguard {

/// The nine groum mutation operators.
enum class MutationKind {
    AddEdge,
    RemoveEdge,
    AddNode,
    RemoveNode,
    ReplaceNode,
    MoveNode,
    AddException,
    RemoveException,
    MoveException,
};
inline constexpr int kMutationKindCount = 9;

const char* to_string(MutationKind k);
MutationKind mutation_kind_from_string(const std::string& s);

/// Labels a mutation may draw from: every API action label observed in the
/// self corpus, plus the exception types seen in CATCH nodes.
struct MutationVocab {
    std::vector<std::string> actionLabels;
    std::vector<std::string> exceptionTypes;

    static MutationVocab from(const SelfCorpus& corpus);
};

struct MutationOp {
    MutationKind kind;
    std::string detail;
};

/// Applies one operator. Throws Inapplicable{kind} when the groum lacks the
/// structure the operator needs; the result always passes Groum::validate().
Groum mutate_groum(const Groum& g, MutationKind kind, const MutationVocab& vocab, Rng& rng);

/// Deletes a node, bridging Order edges across it, re-densifying ids. Shared
/// by the structural mutations and by misuse injection.
Groum remove_node_with_rewire(const Groum& g, int nodeId);

/// Picks operators at random until one applies (at most 9 distinct kinds
/// tried). Throws Inapplicable when none applies.
std::pair<MutationOp, Groum> random_mutation(const Groum& g, const MutationVocab& vocab, Rng& rng);

/// A mutated groum with provenance. Never an unmutated self signature.
struct Detector {
    Groum groum;
    std::vector<MutationOp> provenance;
    std::string originSignature;
    int originCluster = -1;

    // caches, kept in sync by refresh()
    ElementBag bag;
    std::string key; // canonical serialization

    void refresh();
};

/// Fixed-size set of detectors under evolution; no two detectors share a
/// canonical serialization.
struct DetectorSet {
    std::vector<Detector> detectors;

    std::size_t size() const { return detectors.size(); }
    void validate(std::size_t expectedSize) const;
};

struct GAConfig {
    int setSize = 50;
    int populationSize = 30;
    int generations = 100;
    double crossoverProb = 0.9;
    double mutationProb = 0.2;
    double elitismFraction = 0.1;
    double alpha = 0.5;
    double beta = 0.5;
    double bandLow = 0.01;   // l
    double bandHigh = 0.33;  // h
    double offBandCap = 0.75;
    std::uint64_t rngSeed = 0;
    int jobs = 1;

    void validate() const; // throws ConfigError
};

/// The interval mapping applied to minDis: 1 on [l, h]; cap * (minDis / l)
/// below the band; cap * ((1 - minDis) / (1 - h)) above it. 0 exactly at
/// minDis in {0, 1}.
double band_map(double minDis, const GAConfig& cfg);

/// 1 - max similarity between the detector and any self signature.
double min_dis(const ElementBag& detector, const std::vector<ElementBag>& selfBags);

/// band_map(minDis) against the self corpus. Throws EmptySelf.
double client_dis(const Detector& d, const SelfCorpus& selfs, const GAConfig& cfg);

/// 1 - mean similarity with the other detectors of the set; set.detectors[i]
/// is the detector under evaluation. Throws SingletonSet when |set| < 2.
double detector_dis(const DetectorSet& set, std::size_t i);

double fitness_detector(const Detector& d, const SelfCorpus& selfs, const DetectorSet& set,
                        std::size_t indexInSet, const GAConfig& cfg);

/// Mean detector fitness over the set.
double fitness_set(const DetectorSet& set, const SelfCorpus& selfs, const GAConfig& cfg);

/// Single-point exchange of detector subsets; duplicates within an offspring
/// are repaired by a fresh single mutation so the all-distinct invariant holds.
std::pair<DetectorSet, DetectorSet> crossover(const DetectorSet& a, const DetectorSet& b, Rng& rng,
                                              const MutationVocab& vocab);

/// Fitness-proportionate draw; uniform when all weights are zero.
std::size_t roulette_index(const std::vector<double>& weights, Rng& rng);

/// Builds one detector from a self signature with 1..3 random mutations.
/// Negative selection: the result must lie strictly outside the self radius
/// (minDis > 0 and minDis >= selfRadius).
Detector make_detector(const UsageSignature& origin, int cluster, const MutationVocab& vocab,
                       const std::vector<ElementBag>& selfBags, Rng& rng,
                       double selfRadius = 0.0);

std::vector<DetectorSet> initial_population(const SelfCorpus& selfs, int setSize,
                                            const GAConfig& cfg, const MutationVocab& vocab,
                                            Rng& rng);

struct EvolveResult {
    DetectorSet best;
    /// max fitness_set of the population at each generation (index 0 = seed).
    std::vector<double> bestFitnessByGeneration;
};

/// Elitism + fitness-proportionate selection + crossover + mutation over a
/// population of detector sets. Returns the highest-fitness set observed.
/// The returned set satisfies negative selection: minDis > 0 to every self.
EvolveResult evolve(std::vector<DetectorSet> population, const SelfCorpus& selfs,
                    const GAConfig& cfg, const MutationVocab& vocab, Rng& rng);

/// One GA per cluster (set sizes proportional to cluster client counts,
/// minimum 2), winners merged; when the merge exceeds cfg.setSize, a
/// recombination-only roulette-wheel reduction picks the best fixed-size
/// combination without creating new detectors.
DetectorSet parallel_evolution(const std::vector<ScenarioCluster>& clusters,
                               const SelfCorpus& corpus, const GAConfig& cfg);

/// One global GA whose initial sets are seeded by roulette-wheel draws
/// across clusters proportional to cluster client counts.
DetectorSet global_evolution(const std::vector<ScenarioCluster>& clusters,
                             const SelfCorpus& corpus, const GAConfig& cfg);

enum class GenerationStrategy { Parallel, Global, NoCluster };

const char* to_string(GenerationStrategy s);
GenerationStrategy strategy_from_string(const std::string& s);

/// Full detector-generation entry point. NoCluster treats the whole corpus
/// as a single cluster.
DetectorSet generate_detectors(const SelfCorpus& corpus, GenerationStrategy strategy,
                               const GAConfig& cfg);

} // namespace apiguard
