#include "apiguard/detector.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <set>
#include <unordered_map>

#include "apiguard/errors.hpp"

namespace apiguard {

const char* to_string(MutationKind k) {
    switch (k) {
    case MutationKind::AddEdge: return "AddEdge";
    case MutationKind::RemoveEdge: return "RemoveEdge";
    case MutationKind::AddNode: return "AddNode";
    case MutationKind::RemoveNode: return "RemoveNode";
    case MutationKind::ReplaceNode: return "ReplaceNode";
    case MutationKind::MoveNode: return "MoveNode";
    case MutationKind::AddException: return "AddException";
    case MutationKind::RemoveException: return "RemoveException";
    case MutationKind::MoveException: return "MoveException";
    }
    return "?";
}

MutationKind mutation_kind_from_string(const std::string& s) {
    for (int i = 0; i < kMutationKindCount; ++i) {
        auto k = static_cast<MutationKind>(i);
        if (s == to_string(k)) return k;
    }
    throw ConfigError("unknown mutation kind '" + s + "'");
}

const char* to_string(GenerationStrategy s) {
    switch (s) {
    case GenerationStrategy::Parallel: return "parallel";
    case GenerationStrategy::Global: return "global";
    case GenerationStrategy::NoCluster: return "no-cluster";
    }
    return "?";
}

GenerationStrategy strategy_from_string(const std::string& s) {
    if (s == "parallel") return GenerationStrategy::Parallel;
    if (s == "global") return GenerationStrategy::Global;
    if (s == "no-cluster") return GenerationStrategy::NoCluster;
    throw ConfigError("unknown strategy '" + s + "' (parallel|global|no-cluster)");
}

MutationVocab MutationVocab::from(const SelfCorpus& corpus) {
    std::set<std::string> labels;
    std::set<std::string> exceptions;
    for (const UsageSignature& sig : corpus.signatures) {
        for (const Node& n : sig.groum.nodes) {
            if (n.kind == NodeKind::Action)
                labels.insert(n.label);
            else if (*n.control == ControlKind::Catch)
                exceptions.insert(n.label);
        }
    }
    MutationVocab v;
    v.actionLabels.assign(labels.begin(), labels.end());
    v.exceptionTypes.assign(exceptions.begin(), exceptions.end());
    if (v.exceptionTypes.empty()) v.exceptionTypes.push_back("Exception");
    return v;
}

void Detector::refresh() {
    groum.canonicalize();
    bag = elements(groum);
    key = serialize(groum);
}

void DetectorSet::validate(std::size_t expectedSize) const {
    if (detectors.size() != expectedSize)
        throw ConfigError("detector set has " + std::to_string(detectors.size()) +
                          " detectors, expected " + std::to_string(expectedSize));
    std::set<std::string> keys;
    for (const Detector& d : detectors) {
        if (d.provenance.empty()) throw ConfigError("detector without mutation provenance");
        if (!keys.insert(d.key).second) throw ConfigError("duplicate detector in set");
    }
}

void GAConfig::validate() const {
    if (setSize < 2) throw ConfigError("setSize must be >= 2");
    if (populationSize < 1) throw ConfigError("populationSize must be >= 1");
    if (generations < 0) throw ConfigError("generations must be >= 0");
    if (alpha + beta <= 0) throw ConfigError("alpha + beta must be > 0");
    if (!(0 < bandLow && bandLow < bandHigh && bandHigh < 1))
        throw ConfigError("band must satisfy 0 < l < h < 1");
    for (double p : {crossoverProb, mutationProb, elitismFraction})
        if (p < 0 || p > 1) throw ConfigError("probabilities must lie in [0, 1]");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

// ---------------------------------------------------------------------------
// mutation operators

namespace {

std::vector<int> action_ids(const Groum& g) {
    std::vector<int> ids;
    for (const Node& n : g.nodes)
        if (n.kind == NodeKind::Action) ids.push_back(n.id);
    return ids;
}

std::vector<int> catch_ids(const Groum& g) {
    std::vector<int> ids;
    for (const Node& n : g.nodes)
        if (n.kind == NodeKind::Control && *n.control == ControlKind::Catch) ids.push_back(n.id);
    return ids;
}

} // namespace

Groum remove_node_with_rewire(const Groum& g, int victim) {
    Groum out;
    std::vector<int> preds, succs;
    for (const Edge& e : g.edges) {
        if (e.type != EdgeType::Order) continue;
        if (e.dst == victim) preds.push_back(e.src);
        if (e.src == victim) succs.push_back(e.dst);
    }
    std::map<int, int> remap;
    for (const Node& n : g.nodes)
        if (n.id != victim) remap[n.id] = static_cast<int>(remap.size());
    for (const Node& n : g.nodes)
        if (n.id != victim) out.nodes.push_back(Node{remap[n.id], n.label, n.kind, n.control});
    for (const Edge& e : g.edges)
        if (e.src != victim && e.dst != victim)
            out.edges.push_back(Edge{remap[e.src], remap[e.dst], e.type});
    for (int p : preds)
        for (int s : succs)
            if (p != s && !out.hasEdge(remap[p], remap[s], EdgeType::Order))
                out.edges.push_back(Edge{remap[p], remap[s], EdgeType::Order});
    for (const auto& [ctrl, actions] : g.regions) {
        if (ctrl == victim) continue;
        std::vector<int> kept;
        for (int a : actions)
            if (a != victim) kept.push_back(remap[a]);
        if (!kept.empty()) out.regions[remap[ctrl]] = std::move(kept);
    }
    out.canonicalize();
    return out;
}

namespace {

/// A contiguous Order-run of action nodes starting at `start`.
std::vector<int> order_run(const Groum& g, int start, std::size_t maxLen) {
    std::vector<int> run{start};
    int cur = start;
    while (run.size() < maxLen) {
        int next = -1;
        for (const Edge& e : g.edges) {
            if (e.type != EdgeType::Order || e.src != cur) continue;
            if (g.node(e.dst).kind != NodeKind::Action) continue;
            if (next < 0 || e.dst < next) next = e.dst;
        }
        if (next < 0) break;
        run.push_back(next);
        cur = next;
    }
    return run;
}

Groum mutate_add_edge(const Groum& g, const MutationVocab&, Rng& rng) {
    struct Candidate {
        int src, dst;
        EdgeType type;
    };
    std::vector<Candidate> candidates;
    int n = static_cast<int>(g.nodes.size());
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            if (!g.hasEdge(u, v, EdgeType::Order) && !g.orderReaches(v, u))
                candidates.push_back({u, v, EdgeType::Order});
            if (!g.hasEdge(u, v, EdgeType::DataDep))
                candidates.push_back({u, v, EdgeType::DataDep});
            const Node& src = g.node(u);
            bool dstAction = g.node(v).kind == NodeKind::Action;
            if (src.kind == NodeKind::Control && dstAction) {
                if (*src.control == ControlKind::Loop && !g.hasEdge(u, v, EdgeType::LoopInclusion))
                    candidates.push_back({u, v, EdgeType::LoopInclusion});
                if (*src.control == ControlKind::Catch && !g.hasEdge(u, v, EdgeType::ExceptionScope))
                    candidates.push_back({u, v, EdgeType::ExceptionScope});
            }
        }
    }
    if (candidates.empty()) throw Inapplicable("AddEdge");
    Candidate c = candidates[rng.nextIndex(candidates.size())];
    Groum out = g;
    out.edges.push_back(Edge{c.src, c.dst, c.type});
    out.canonicalize();
    return out;
}

Groum mutate_remove_edge(const Groum& g, Rng& rng) {
    if (g.edges.empty()) throw Inapplicable("RemoveEdge");
    Groum out = g;
    out.edges.erase(out.edges.begin() + static_cast<std::ptrdiff_t>(rng.nextIndex(out.edges.size())));
    return out;
}

Groum mutate_add_node(const Groum& g, const MutationVocab& vocab, Rng& rng) {
    if (vocab.actionLabels.empty()) throw Inapplicable("AddNode");
    Groum out = g;
    int id = static_cast<int>(out.nodes.size());
    std::string label = vocab.actionLabels[rng.nextIndex(vocab.actionLabels.size())];
    out.nodes.push_back(Node{id, label, NodeKind::Action, std::nullopt});
    if (id > 0) {
        // splice with one Order edge at a random position
        int anchor = static_cast<int>(rng.nextIndex(static_cast<std::size_t>(id)));
        if (rng.nextBool(0.5))
            out.edges.push_back(Edge{anchor, id, EdgeType::Order});
        else
            out.edges.push_back(Edge{id, anchor, EdgeType::Order});
    }
    out.canonicalize();
    return out;
}

Groum mutate_remove_node(const Groum& g, Rng& rng) {
    std::vector<int> actions = action_ids(g);
    if (g.nodes.size() < 2 || actions.empty()) throw Inapplicable("RemoveNode");
    int victim = actions[rng.nextIndex(actions.size())];
    return remove_node_with_rewire(g, victim);
}

Groum mutate_replace_node(const Groum& g, const MutationVocab& vocab, Rng& rng) {
    std::vector<int> actions = action_ids(g);
    if (actions.empty() || vocab.actionLabels.size() < 2) throw Inapplicable("ReplaceNode");
    int target = actions[rng.nextIndex(actions.size())];
    Groum out = g;
    std::string& label = out.nodes[static_cast<std::size_t>(target)].label;
    std::string fresh;
    for (int attempt = 0; attempt < 16; ++attempt) {
        fresh = vocab.actionLabels[rng.nextIndex(vocab.actionLabels.size())];
        if (fresh != label) break;
    }
    if (fresh == label) throw Inapplicable("ReplaceNode");
    label = fresh;
    return out;
}

Groum mutate_move_node(const Groum& g, Rng& rng) {
    std::vector<int> actions = action_ids(g);
    if (g.nodes.size() < 2 || actions.empty()) throw Inapplicable("MoveNode");
    for (int attempt = 0; attempt < 16; ++attempt) {
        int x = actions[rng.nextIndex(actions.size())];
        // detach: bridge Order edges across x, keeping the node
        Groum out = g;
        std::vector<int> preds, succs;
        std::erase_if(out.edges, [&](const Edge& e) {
            if (e.type != EdgeType::Order) return false;
            if (e.dst == x) preds.push_back(e.src);
            if (e.src == x) succs.push_back(e.dst);
            return e.src == x || e.dst == x;
        });
        for (int p : preds)
            for (int s : succs)
                if (p != s && !out.hasEdge(p, s, EdgeType::Order))
                    out.edges.push_back(Edge{p, s, EdgeType::Order});
        // re-splice at a random new position
        std::vector<int> anchors;
        for (const Node& n : out.nodes)
            if (n.id != x) anchors.push_back(n.id);
        int anchor = anchors[rng.nextIndex(anchors.size())];
        bool forward = rng.nextBool(0.5);
        int src = forward ? anchor : x;
        int dst = forward ? x : anchor;
        if (out.hasEdge(src, dst, EdgeType::Order) || out.orderReaches(dst, src)) continue;
        out.edges.push_back(Edge{src, dst, EdgeType::Order});
        out.canonicalize();
        if (!(out == g)) return out;
    }
    throw Inapplicable("MoveNode");
}

Groum mutate_add_exception(const Groum& g, const MutationVocab& vocab, Rng& rng) {
    std::vector<int> actions = action_ids(g);
    if (actions.empty()) throw Inapplicable("AddException");
    int start = actions[rng.nextIndex(actions.size())];
    std::size_t len = 1 + rng.nextIndex(actions.size());
    std::vector<int> run = order_run(g, start, len);
    Groum out = g;
    int id = static_cast<int>(out.nodes.size());
    std::string type = vocab.exceptionTypes[rng.nextIndex(vocab.exceptionTypes.size())];
    out.nodes.push_back(Node{id, type, NodeKind::Control, ControlKind::Catch});
    for (int a : run) out.edges.push_back(Edge{id, a, EdgeType::ExceptionScope});
    // the handler follows the guarded run
    out.edges.push_back(Edge{run.back(), id, EdgeType::Order});
    out.canonicalize();
    return out;
}

Groum mutate_remove_exception(const Groum& g, Rng& rng) {
    std::vector<int> catches = catch_ids(g);
    if (catches.empty()) throw Inapplicable("RemoveException");
    return remove_node_with_rewire(g, catches[rng.nextIndex(catches.size())]);
}

Groum mutate_move_exception(const Groum& g, Rng& rng) {
    std::vector<int> catches = catch_ids(g);
    std::vector<int> actions = action_ids(g);
    if (catches.empty() || actions.empty()) throw Inapplicable("MoveException");
    int c = catches[rng.nextIndex(catches.size())];
    std::set<int> current;
    for (const Edge& e : g.edges)
        if (e.type == EdgeType::ExceptionScope && e.src == c) current.insert(e.dst);
    for (int attempt = 0; attempt < 16; ++attempt) {
        int start = actions[rng.nextIndex(actions.size())];
        std::size_t len = 1 + rng.nextIndex(actions.size());
        std::vector<int> run = order_run(g, start, len);
        std::set<int> proposed(run.begin(), run.end());
        if (proposed == current) continue;
        Groum out = g;
        std::erase_if(out.edges,
                      [&](const Edge& e) { return e.type == EdgeType::ExceptionScope && e.src == c; });
        for (int a : run) out.edges.push_back(Edge{c, a, EdgeType::ExceptionScope});
        out.canonicalize();
        return out;
    }
    throw Inapplicable("MoveException");
}

} // namespace

Groum mutate_groum(const Groum& g, MutationKind kind, const MutationVocab& vocab, Rng& rng) {
    Groum out = [&] {
        switch (kind) {
        case MutationKind::AddEdge: return mutate_add_edge(g, vocab, rng);
        case MutationKind::RemoveEdge: return mutate_remove_edge(g, rng);
        case MutationKind::AddNode: return mutate_add_node(g, vocab, rng);
        case MutationKind::RemoveNode: return mutate_remove_node(g, rng);
        case MutationKind::ReplaceNode: return mutate_replace_node(g, vocab, rng);
        case MutationKind::MoveNode: return mutate_move_node(g, rng);
        case MutationKind::AddException: return mutate_add_exception(g, vocab, rng);
        case MutationKind::RemoveException: return mutate_remove_exception(g, rng);
        case MutationKind::MoveException: return mutate_move_exception(g, rng);
        }
        throw Inapplicable("unknown");
    }();
    out.validate();
    return out;
}

std::pair<MutationOp, Groum> random_mutation(const Groum& g, const MutationVocab& vocab, Rng& rng) {
    std::vector<int> kinds(kMutationKindCount);
    std::iota(kinds.begin(), kinds.end(), 0);
    // bounded retries: each kind tried at most once, in random order
    for (std::size_t remaining = kinds.size(); remaining > 0; --remaining) {
        std::size_t pick = rng.nextIndex(remaining);
        std::swap(kinds[pick], kinds[remaining - 1]);
        auto kind = static_cast<MutationKind>(kinds[remaining - 1]);
        try {
            Groum mutated = mutate_groum(g, kind, vocab, rng);
            return {MutationOp{kind, std::string(to_string(kind))}, std::move(mutated)};
        } catch (const Inapplicable&) {
            continue;
        }
    }
    throw Inapplicable("all mutation operators");
}

// ---------------------------------------------------------------------------
// fitness

double band_map(double minDis, const GAConfig& cfg) {
    if (minDis >= cfg.bandLow && minDis <= cfg.bandHigh) return 1.0;
    if (minDis < cfg.bandLow) return cfg.offBandCap * (minDis / cfg.bandLow);
    return cfg.offBandCap * ((1.0 - minDis) / (1.0 - cfg.bandHigh));
}

double min_dis(const ElementBag& detector, const std::vector<ElementBag>& selfBags) {
    double best = 0.0;
    for (const ElementBag& s : selfBags) best = std::max(best, sim_bags(detector, s));
    return 1.0 - best;
}

namespace {

std::vector<ElementBag> self_bags(const SelfCorpus& selfs) {
    std::vector<ElementBag> bags;
    bags.reserve(selfs.signatures.size());
    for (const UsageSignature& s : selfs.signatures) bags.push_back(elements(s.groum));
    return bags;
}

/// Caches the expensive minDis lookups across generations.
class Evaluator {
public:
    Evaluator(const SelfCorpus& selfs, const GAConfig& cfg)
        : bags_(self_bags(selfs)), cfg_(cfg) {
        if (bags_.empty()) throw EmptySelf();
    }

    double minDis(const Detector& d) {
        auto it = cache_.find(d.key);
        if (it != cache_.end()) return it->second;
        double v = min_dis(d.bag, bags_);
        cache_.emplace(d.key, v);
        return v;
    }

    double clientDis(const Detector& d) { return band_map(minDis(d), cfg_); }

    double setFitness(const DetectorSet& set) {
        std::size_t n = set.size();
        if (n < 2) throw SingletonSet();
        std::vector<double> simSums(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double s = sim_bags(set.detectors[i].bag, set.detectors[j].bag);
                simSums[i] += s;
                simSums[j] += s;
            }
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dDis = 1.0 - simSums[i] / static_cast<double>(n - 1);
            total += cfg_.alpha * clientDis(set.detectors[i]) + cfg_.beta * dDis;
        }
        return total / static_cast<double>(n);
    }

    const std::vector<ElementBag>& bags() const { return bags_; }

private:
    std::vector<ElementBag> bags_;
    GAConfig cfg_;
    std::unordered_map<std::string, double> cache_;
};

} // namespace

double client_dis(const Detector& d, const SelfCorpus& selfs, const GAConfig& cfg) {
    if (selfs.signatures.empty()) throw EmptySelf();
    return band_map(min_dis(d.bag, self_bags(selfs)), cfg);
}

double detector_dis(const DetectorSet& set, std::size_t i) {
    std::size_t n = set.size();
    if (n < 2) throw SingletonSet();
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        sum += sim_bags(set.detectors[i].bag, set.detectors[j].bag);
    }
    return 1.0 - sum / static_cast<double>(n - 1);
}

double fitness_detector(const Detector& d, const SelfCorpus& selfs, const DetectorSet& set,
                        std::size_t indexInSet, const GAConfig& cfg) {
    return cfg.alpha * client_dis(d, selfs, cfg) + cfg.beta * detector_dis(set, indexInSet);
}

double fitness_set(const DetectorSet& set, const SelfCorpus& selfs, const GAConfig& cfg) {
    Evaluator eval(selfs, cfg);
    return eval.setFitness(set);
}

// ---------------------------------------------------------------------------
// genetic operators over detector sets

std::size_t roulette_index(const std::vector<double>& weights, Rng& rng) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total <= 0.0) return rng.nextIndex(weights.size());
    double r = rng.nextDouble() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc) return i;
    }
    return weights.size() - 1;
}

namespace {

bool key_in(const std::vector<Detector>& ds, const std::string& key, std::size_t excluding) {
    for (std::size_t i = 0; i < ds.size(); ++i)
        if (i != excluding && ds[i].key == key) return true;
    return false;
}

/// Re-mutates detectors[i] until its key is unique within the set.
void repair_duplicate(std::vector<Detector>& ds, std::size_t i, const MutationVocab& vocab,
                      Rng& rng) {
    for (int attempt = 0; attempt < 64 && key_in(ds, ds[i].key, i); ++attempt) {
        auto [op, mutated] = random_mutation(ds[i].groum, vocab, rng);
        ds[i].groum = std::move(mutated);
        ds[i].provenance.push_back(op);
        ds[i].refresh();
    }
}

} // namespace

std::pair<DetectorSet, DetectorSet> crossover(const DetectorSet& a, const DetectorSet& b, Rng& rng,
                                              const MutationVocab& vocab) {
    std::size_t n = a.size();
    std::size_t cut = rng.nextIndex(n + 1);
    DetectorSet c1, c2;
    c1.detectors.assign(a.detectors.begin(), a.detectors.begin() + static_cast<std::ptrdiff_t>(cut));
    c1.detectors.insert(c1.detectors.end(), b.detectors.begin() + static_cast<std::ptrdiff_t>(cut),
                        b.detectors.end());
    c2.detectors.assign(b.detectors.begin(), b.detectors.begin() + static_cast<std::ptrdiff_t>(cut));
    c2.detectors.insert(c2.detectors.end(), a.detectors.begin() + static_cast<std::ptrdiff_t>(cut),
                        a.detectors.end());
    for (DetectorSet* s : {&c1, &c2})
        for (std::size_t i = 0; i < s->detectors.size(); ++i)
            repair_duplicate(s->detectors, i, vocab, rng);
    return {std::move(c1), std::move(c2)};
}

Detector make_detector(const UsageSignature& origin, int cluster, const MutationVocab& vocab,
                       const std::vector<ElementBag>& selfBags, Rng& rng, double selfRadius) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        Detector d;
        d.groum = origin.groum;
        d.originSignature = origin.sourceMethod;
        d.originCluster = cluster;
        std::size_t ops = 1 + rng.nextIndex(3);
        try {
            for (std::size_t i = 0; i < ops; ++i) {
                auto [op, mutated] = random_mutation(d.groum, vocab, rng);
                d.groum = std::move(mutated);
                d.provenance.push_back(op);
            }
        } catch (const Inapplicable&) {
            continue;
        }
        d.refresh();
        double md = min_dis(d.bag, selfBags);
        if (md > 0.0 && md >= selfRadius) return d;
    }
    throw Inapplicable("detector generation (cannot deviate from self)");
}

std::vector<DetectorSet> initial_population(const SelfCorpus& selfs, int setSize,
                                            const GAConfig& cfg, const MutationVocab& vocab,
                                            Rng& rng) {
    if (selfs.signatures.empty()) throw EmptySelf();
    std::vector<ElementBag> bags = self_bags(selfs);
    std::vector<DetectorSet> population;
    for (int p = 0; p < cfg.populationSize; ++p) {
        DetectorSet set;
        while (set.detectors.size() < static_cast<std::size_t>(setSize)) {
            const UsageSignature& origin =
                selfs.signatures[rng.nextIndex(selfs.signatures.size())];
            Detector d = make_detector(origin, -1, vocab, bags, rng, cfg.bandLow);
            if (!key_in(set.detectors, d.key, set.detectors.size()))
                set.detectors.push_back(std::move(d));
        }
        population.push_back(std::move(set));
    }
    return population;
}

namespace {

/// Enforces negative selection and uniqueness on the winning set.
void enforce_negative_selection(DetectorSet& set, Evaluator& eval, const MutationVocab& vocab,
                                Rng& rng, double selfRadius) {
    for (std::size_t i = 0; i < set.detectors.size(); ++i) {
        Detector& d = set.detectors[i];
        for (int attempt = 0; attempt < 128; ++attempt) {
            bool dup = key_in(set.detectors, d.key, i);
            double md = eval.minDis(d);
            if (!dup && md > 0.0 && md >= selfRadius) break;
            auto [op, mutated] = random_mutation(d.groum, vocab, rng);
            d.groum = std::move(mutated);
            d.provenance.push_back(op);
            d.refresh();
        }
    }
}

} // namespace

EvolveResult evolve(std::vector<DetectorSet> population, const SelfCorpus& selfs,
                    const GAConfig& cfg, const MutationVocab& vocab, Rng& rng) {
    cfg.validate();
    if (population.empty()) throw ConfigError("empty seed population");
    Evaluator eval(selfs, cfg);

    std::vector<double> fitness(population.size());
    auto evaluate = [&] {
        for (std::size_t i = 0; i < population.size(); ++i)
            fitness[i] = eval.setFitness(population[i]);
    };
    evaluate();

    EvolveResult result;
    std::size_t bestIdx =
        static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
    result.best = population[bestIdx];
    double bestFit = fitness[bestIdx];
    result.bestFitnessByGeneration.push_back(bestFit);

    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });

        std::size_t elites = std::min<std::size_t>(
            population.size(),
            static_cast<std::size_t>(std::llround(cfg.elitismFraction *
                                                  static_cast<double>(population.size()))));
        if (cfg.elitismFraction > 0 && elites == 0) elites = 1;

        std::vector<DetectorSet> next;
        for (std::size_t e = 0; e < elites; ++e) next.push_back(population[order[e]]);

        while (next.size() < population.size()) {
            std::size_t pa = roulette_index(fitness, rng);
            std::size_t pb = roulette_index(fitness, rng);
            DetectorSet c1 = population[pa];
            DetectorSet c2 = population[pb];
            if (rng.nextBool(cfg.crossoverProb))
                std::tie(c1, c2) = crossover(population[pa], population[pb], rng, vocab);
            for (DetectorSet* child : {&c1, &c2}) {
                if (rng.nextBool(cfg.mutationProb)) {
                    for (std::size_t i = 0; i < child->detectors.size(); ++i) {
                        if (!rng.nextBool(cfg.mutationProb)) continue;
                        try {
                            auto [op, mutated] =
                                random_mutation(child->detectors[i].groum, vocab, rng);
                            child->detectors[i].groum = std::move(mutated);
                            child->detectors[i].provenance.push_back(op);
                            child->detectors[i].refresh();
                        } catch (const Inapplicable&) {
                        }
                        repair_duplicate(child->detectors, i, vocab, rng);
                    }
                }
                if (next.size() < population.size()) next.push_back(std::move(*child));
            }
        }
        population = std::move(next);
        evaluate();

        bestIdx = static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) -
                                           fitness.begin());
        if (fitness[bestIdx] > bestFit) {
            bestFit = fitness[bestIdx];
            result.best = population[bestIdx];
        }
        result.bestFitnessByGeneration.push_back(
            std::max(bestFit, *std::max_element(fitness.begin(), fitness.end())));
    }

    enforce_negative_selection(result.best, eval, vocab, rng, cfg.bandLow);
    return result;
}

// ---------------------------------------------------------------------------
// generation strategies

namespace {

/// Largest-remainder allocation of cfg.setSize across clusters, proportional
/// to client counts, then raised to the minimum of 2 per cluster.
std::vector<int> allocate_set_sizes(const std::vector<ScenarioCluster>& clusters, int setSize) {
    std::size_t k = clusters.size();
    double total = 0;
    for (const ScenarioCluster& c : clusters) total += static_cast<double>(c.clientSignatures.size());
    std::vector<int> sizes(k, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    int assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double raw = total > 0 ? setSize * static_cast<double>(clusters[i].clientSignatures.size()) / total
                               : static_cast<double>(setSize) / static_cast<double>(k);
        sizes[i] = static_cast<int>(raw);
        assigned += sizes[i];
        remainders.push_back({raw - sizes[i], i});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int r = 0; r < setSize - assigned; ++r) ++sizes[remainders[static_cast<std::size_t>(r) % remainders.size()].second];
    for (int& s : sizes) s = std::max(s, 2);
    return sizes;
}

DetectorSet evolve_cluster(const ScenarioCluster& cluster, const SelfCorpus& corpus, int setSize,
                           const GAConfig& cfg, const MutationVocab& vocab, Rng rng) {
    SelfCorpus clusterSelfs{corpus.api, cluster.clientSignatures};
    std::vector<DetectorSet> seed = initial_population(clusterSelfs, setSize, cfg, vocab, rng);
    for (DetectorSet& s : seed)
        for (Detector& d : s.detectors) d.originCluster = cluster.id;
    EvolveResult r = evolve(std::move(seed), clusterSelfs, cfg, vocab, rng);
    return r.best;
}

/// Recombination-only reduction of a merged pool to exactly setSize
/// detectors; never creates a detector absent from the pool.
DetectorSet merge_reduce(std::vector<Detector> pool, const SelfCorpus& corpus, const GAConfig& cfg,
                         Rng& rng) {
    // dedupe, keeping first occurrence (cluster-id merge order)
    {
        std::set<std::string> seen;
        std::vector<Detector> unique;
        for (Detector& d : pool)
            if (seen.insert(d.key).second) unique.push_back(std::move(d));
        pool = std::move(unique);
    }
    std::size_t target = static_cast<std::size_t>(cfg.setSize);
    if (pool.size() <= target) {
        DetectorSet all;
        all.detectors = std::move(pool);
        return all;
    }

    Evaluator eval(corpus, cfg);
    DetectorSet poolSet;
    poolSet.detectors = pool;
    std::vector<double> detFitness(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        detFitness[i] = cfg.alpha * eval.clientDis(pool[i]) + cfg.beta * detector_dis(poolSet, i);

    auto drawCombination = [&] {
        std::vector<std::size_t> combo;
        std::vector<bool> used(pool.size(), false);
        std::vector<double> weights = detFitness;
        while (combo.size() < target) {
            std::size_t pick = roulette_index(weights, rng);
            if (used[pick]) {
                // zero the weight and draw again
                weights[pick] = 0.0;
                bool anyLeft = std::any_of(used.begin(), used.end(), [](bool u) { return !u; });
                if (!anyLeft) break;
                continue;
            }
            used[pick] = true;
            weights[pick] = 0.0;
            combo.push_back(pick);
        }
        return combo;
    };

    auto comboFitness = [&](const std::vector<std::size_t>& combo) {
        DetectorSet s;
        for (std::size_t i : combo) s.detectors.push_back(pool[i]);
        return eval.setFitness(s);
    };

    std::vector<std::vector<std::size_t>> population;
    for (int p = 0; p < cfg.populationSize; ++p) population.push_back(drawCombination());
    std::vector<double> fitness(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) fitness[i] = comboFitness(population[i]);

    std::vector<std::size_t> best = population[static_cast<std::size_t>(
        std::max_element(fitness.begin(), fitness.end()) - fitness.begin())];
    double bestFit = *std::max_element(fitness.begin(), fitness.end());

    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<std::size_t> order(population.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
        std::size_t elites = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(cfg.elitismFraction *
                                                     static_cast<double>(population.size()))));
        std::vector<std::vector<std::size_t>> next;
        for (std::size_t e = 0; e < std::min(elites, population.size()); ++e)
            next.push_back(population[order[e]]);
        while (next.size() < population.size()) {
            std::size_t pa = roulette_index(fitness, rng);
            std::size_t pb = roulette_index(fitness, rng);
            std::vector<std::size_t> child = population[pa];
            if (rng.nextBool(cfg.crossoverProb)) {
                std::size_t cut = rng.nextIndex(target + 1);
                child.assign(population[pa].begin(),
                             population[pa].begin() + static_cast<std::ptrdiff_t>(cut));
                child.insert(child.end(), population[pb].begin() + static_cast<std::ptrdiff_t>(cut),
                             population[pb].end());
                // repair duplicate indices from the unused part of the pool
                std::set<std::size_t> seen;
                std::vector<double> weights = detFitness;
                for (std::size_t i : child) weights[i] = 0.0;
                for (std::size_t& i : child) {
                    if (seen.insert(i).second) continue;
                    std::size_t replacement = roulette_index(weights, rng);
                    while (seen.count(replacement)) {
                        weights[replacement] = 0.0;
                        replacement = roulette_index(weights, rng);
                    }
                    i = replacement;
                    seen.insert(replacement);
                    weights[replacement] = 0.0;
                }
            }
            next.push_back(std::move(child));
        }
        population = std::move(next);
        for (std::size_t i = 0; i < population.size(); ++i) fitness[i] = comboFitness(population[i]);
        std::size_t bi = static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) -
                                                  fitness.begin());
        if (fitness[bi] > bestFit) {
            bestFit = fitness[bi];
            best = population[bi];
        }
    }

    DetectorSet out;
    for (std::size_t i : best) out.detectors.push_back(pool[i]);
    return out;
}

} // namespace

DetectorSet parallel_evolution(const std::vector<ScenarioCluster>& clusters,
                               const SelfCorpus& corpus, const GAConfig& cfg) {
    cfg.validate();
    if (clusters.empty()) throw ConfigError("no clusters to evolve");
    MutationVocab vocab = MutationVocab::from(corpus);
    std::vector<int> sizes = allocate_set_sizes(clusters, cfg.setSize);
    Rng master(cfg.rngSeed);

    std::vector<DetectorSet> winners(clusters.size());
    auto runOne = [&](std::size_t i) {
        winners[i] = evolve_cluster(clusters[i], corpus, sizes[i], cfg, vocab,
                                    master.split(1000 + static_cast<std::uint64_t>(i)));
    };
    if (cfg.jobs > 1 && clusters.size() > 1) {
        std::vector<std::future<void>> futures;
        for (std::size_t i = 0; i < clusters.size(); ++i)
            futures.push_back(std::async(std::launch::async, runOne, i));
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < clusters.size(); ++i) runOne(i);
    }

    std::vector<Detector> merged;
    for (const DetectorSet& w : winners)
        merged.insert(merged.end(), w.detectors.begin(), w.detectors.end());
    if (merged.size() <= static_cast<std::size_t>(cfg.setSize)) {
        // small merges need no reduction, but still dedupe
        Rng rng = master.split(2000);
        return merge_reduce(std::move(merged), corpus, cfg, rng);
    }
    Rng rng = master.split(2000);
    return merge_reduce(std::move(merged), corpus, cfg, rng);
}

DetectorSet global_evolution(const std::vector<ScenarioCluster>& clusters,
                             const SelfCorpus& corpus, const GAConfig& cfg) {
    cfg.validate();
    if (clusters.empty()) throw ConfigError("no clusters to evolve");
    MutationVocab vocab = MutationVocab::from(corpus);
    std::vector<ElementBag> bags = self_bags(corpus);
    if (bags.empty()) throw EmptySelf();
    Rng rng(cfg.rngSeed);

    std::vector<double> clusterWeights;
    for (const ScenarioCluster& c : clusters)
        clusterWeights.push_back(static_cast<double>(c.clientSignatures.size()));

    std::vector<DetectorSet> seed;
    for (int p = 0; p < cfg.populationSize; ++p) {
        DetectorSet set;
        while (set.detectors.size() < static_cast<std::size_t>(cfg.setSize)) {
            const ScenarioCluster& c = clusters[roulette_index(clusterWeights, rng)];
            if (c.clientSignatures.empty()) continue;
            const UsageSignature& origin =
                c.clientSignatures[rng.nextIndex(c.clientSignatures.size())];
            Detector d = make_detector(origin, c.id, vocab, bags, rng, cfg.bandLow);
            bool dup = std::any_of(set.detectors.begin(), set.detectors.end(),
                                   [&](const Detector& e) { return e.key == d.key; });
            if (!dup) set.detectors.push_back(std::move(d));
        }
        seed.push_back(std::move(set));
    }

    EvolveResult r = evolve(std::move(seed), corpus, cfg, vocab, rng);
    return r.best;
}

DetectorSet generate_detectors(const SelfCorpus& corpus, GenerationStrategy strategy,
                               const GAConfig& cfg) {
    if (corpus.signatures.empty()) throw EmptySelf();
    if (strategy == GenerationStrategy::NoCluster) {
        ScenarioCluster all;
        all.id = 0;
        for (const UsageSignature& sig : corpus.signatures)
            for (const Node& n : sig.groum.nodes)
                if (n.kind == NodeKind::Action) all.apiMethods.insert(n.label);
        all.clientSignatures = corpus.signatures;
        return global_evolution({all}, corpus, cfg);
    }
    std::vector<ScenarioCluster> clusters = derive_clusters(corpus);
    if (strategy == GenerationStrategy::Parallel) return parallel_evolution(clusters, corpus, cfg);
    return global_evolution(clusters, corpus, cfg);
}

} // namespace apiguard
