#include "apiguard/eval.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <set>

#include "apiguard/errors.hpp"

namespace apiguard {

const char* to_string(CaseLabel l) { return l == CaseLabel::GoodUse ? "good" : "misuse"; }

const char* to_string(MisuseKind k) {
    switch (k) {
    case MisuseKind::MissingCall: return "missing-call";
    case MisuseKind::MissingExceptionHandling: return "missing-exception-handling";
    case MisuseKind::MissingConditionOrState: return "missing-condition-or-state";
    case MisuseKind::SwappedOrder: return "swapped-order";
    }
    return "?";
}

MisuseKind misuse_kind_from_string(const std::string& s) {
    for (MisuseKind k : {MisuseKind::MissingCall, MisuseKind::MissingExceptionHandling,
                         MisuseKind::MissingConditionOrState, MisuseKind::SwappedOrder})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown misuse kind '" + s + "'");
}

namespace {

Groum damage(const UsageSignature& sig, MisuseKind kind, Rng& rng) {
    const Groum& g = sig.groum;
    switch (kind) {
    case MisuseKind::MissingCall: {
        std::vector<int> actions;
        for (const Node& n : g.nodes)
            if (n.kind == NodeKind::Action) actions.push_back(n.id);
        if (g.nodes.size() < 2 || actions.empty())
            throw Inapplicable(to_string(kind));
        return remove_node_with_rewire(g, actions[rng.nextIndex(actions.size())]);
    }
    case MisuseKind::MissingExceptionHandling: {
        MutationVocab unused;
        return mutate_groum(g, MutationKind::RemoveException, unused, rng);
    }
    case MisuseKind::MissingConditionOrState: {
        std::vector<int> ifs;
        for (const Node& n : g.nodes)
            if (n.kind == NodeKind::Control && *n.control == ControlKind::If) ifs.push_back(n.id);
        if (ifs.empty()) throw Inapplicable(to_string(kind));
        return remove_node_with_rewire(g, ifs[rng.nextIndex(ifs.size())]);
    }
    case MisuseKind::SwappedOrder: {
        MutationVocab unused;
        return mutate_groum(g, MutationKind::MoveNode, unused, rng);
    }
    }
    throw Inapplicable("unknown");
}

} // namespace

LabeledCase inject_misuse(const UsageSignature& sig, MisuseKind kind, Rng& rng) {
    std::string before = serialize(sig.groum);
    for (int attempt = 0; attempt < 16; ++attempt) {
        Groum damaged = damage(sig, kind, rng);
        if (serialize(damaged) == before) continue;
        LabeledCase c;
        c.signature = sig;
        c.signature.groum = std::move(damaged);
        c.signature.sourceMethod = sig.sourceMethod + "#" + to_string(kind);
        c.label = CaseLabel::Misuse;
        c.misuseKind = kind;
        return c;
    }
    throw Inapplicable(to_string(kind));
}

std::vector<Fold> kfold_split(const std::vector<LabeledCase>& corpus, int k, std::uint64_t seed) {
    if (k < 2) throw TooFewCases("k must be at least 2");
    std::vector<LabeledCase> goods, misuses;
    for (const LabeledCase& c : corpus)
        (c.label == CaseLabel::GoodUse ? goods : misuses).push_back(c);
    if (static_cast<int>(goods.size()) < k)
        throw TooFewCases("need at least k good uses, have " + std::to_string(goods.size()));

    Rng rng(seed);
    auto shuffle = [&](std::vector<LabeledCase>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[rng.nextIndex(i)]);
    };
    shuffle(goods);
    shuffle(misuses);

    std::vector<Fold> folds(static_cast<std::size_t>(k));
    std::vector<std::vector<LabeledCase>> goodFolds(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < goods.size(); ++i)
        goodFolds[i % static_cast<std::size_t>(k)].push_back(goods[i]);

    std::size_t misuseCursor = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        if (goodFolds[f].empty()) throw TooFewCases("fold " + std::to_string(f) + " is empty");
        Fold& fold = folds[f];
        fold.test = goodFolds[f];
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f)
                fold.train.insert(fold.train.end(), goodFolds[g].begin(), goodFolds[g].end());
        for (std::size_t i = 0; i < goodFolds[f].size(); ++i) {
            if (misuseCursor >= misuses.size())
                throw TooFewCases("not enough misuses for balanced test folds");
            fold.test.push_back(misuses[misuseCursor++]);
        }
    }
    return folds;
}

namespace {

int count_hits(const std::vector<RiskReport>& ranked,
               const std::map<std::string, CaseLabel>& labels, int k) {
    if (k < 1 || k > static_cast<int>(ranked.size()))
        throw ConfigError("k out of range: " + std::to_string(k));
    int hits = 0;
    for (int i = 0; i < k; ++i) {
        auto it = labels.find(ranked[static_cast<std::size_t>(i)].method);
        if (it == labels.end()) throw ConfigError("unlabeled method '" + ranked[static_cast<std::size_t>(i)].method + "'");
        if (it->second == CaseLabel::Misuse) ++hits;
    }
    return hits;
}

} // namespace

double precision_at_k(const std::vector<RiskReport>& ranked,
                      const std::map<std::string, CaseLabel>& labels, int k) {
    return static_cast<double>(count_hits(ranked, labels, k)) / static_cast<double>(k);
}

double recall_at_k(const std::vector<RiskReport>& ranked,
                   const std::map<std::string, CaseLabel>& labels, int k) {
    int total = 0;
    for (const auto& [method, label] : labels)
        if (label == CaseLabel::Misuse) ++total;
    if (total == 0) return 0.0;
    return static_cast<double>(count_hits(ranked, labels, k)) / static_cast<double>(total);
}

void check_no_leak(const Fold& fold) {
    std::set<std::string> trainMethods;
    for (const LabeledCase& c : fold.train) trainMethods.insert(c.signature.sourceMethod);
    for (const LabeledCase& c : fold.test)
        if (trainMethods.count(c.signature.sourceMethod)) throw LeakError(c.signature.sourceMethod);
}

FoldResult run_fold(const Fold& fold, const ApiSpec& api, const PipelineConfig& cfg,
                    std::uint64_t foldSeed) {
    check_no_leak(fold);

    auto adapt = [&](const UsageSignature& s) {
        return cfg.simpleGroums && !s.simple ? simplify(s) : s;
    };

    SelfCorpus train;
    train.api = api;
    for (const LabeledCase& c : fold.train) {
        if (c.label != CaseLabel::GoodUse)
            throw ConfigError("train set contains a misuse: " + c.signature.sourceMethod);
        train.signatures.push_back(adapt(c.signature));
    }

    GAConfig ga = cfg.ga;
    ga.rngSeed = foldSeed;
    DetectorSet detectors = generate_detectors(train, cfg.strategy, ga);

    std::vector<UsageSignature> candidates;
    std::map<std::string, CaseLabel> labels;
    for (const LabeledCase& c : fold.test) {
        candidates.push_back(adapt(c.signature));
        labels[c.signature.sourceMethod] = c.label;
    }

    FoldResult result;
    result.ranked = rank(candidates, detectors, cfg.simpleGroums, cfg.risk);
    result.testSize = static_cast<int>(fold.test.size());
    for (const auto& [method, label] : labels)
        if (label == CaseLabel::Misuse) ++result.misuses;

    int n = result.testSize;
    for (double frac : {0.10, 0.30}) {
        int k = std::max(1, static_cast<int>(std::llround(frac * n)));
        result.hitsAtK[k] = count_hits(result.ranked, labels, k);
        result.precisionAtK[k] = precision_at_k(result.ranked, labels, k);
        result.recallAtK[k] = recall_at_k(result.ranked, labels, k);
    }
    return result;
}

CvResult run_cv(const std::vector<LabeledCase>& corpus, const ApiSpec& api,
                const PipelineConfig& cfg) {
    std::vector<Fold> folds = kfold_split(corpus, cfg.folds, cfg.seed);
    Rng master(cfg.seed);

    CvResult result;
    result.config = cfg;
    result.perFold.resize(folds.size());

    auto runOne = [&](std::size_t i) {
        std::uint64_t foldSeed = master.split(100 + static_cast<std::uint64_t>(i)).nextU64();
        result.perFold[i] = run_fold(folds[i], api, cfg, foldSeed);
    };
    if (cfg.ga.jobs > 1 && folds.size() > 1) {
        std::vector<std::future<void>> futures;
        for (std::size_t i = 0; i < folds.size(); ++i)
            futures.push_back(std::async(std::launch::async, runOne, i));
        for (auto& f : futures) f.get();
    } else {
        for (std::size_t i = 0; i < folds.size(); ++i) runOne(i);
    }

    std::map<int, std::pair<double, int>> pAcc, rAcc;
    for (const FoldResult& f : result.perFold) {
        for (const auto& [k, v] : f.precisionAtK) {
            pAcc[k].first += v;
            ++pAcc[k].second;
        }
        for (const auto& [k, v] : f.recallAtK) {
            rAcc[k].first += v;
            ++rAcc[k].second;
        }
    }
    for (const auto& [k, acc] : pAcc) result.meanPrecisionAtK[k] = acc.first / acc.second;
    for (const auto& [k, acc] : rAcc) result.meanRecallAtK[k] = acc.first / acc.second;
    return result;
}

double binomial_sf(int successes, int trials, double p0) {
    if (trials <= 0) throw ConfigError("trials must be positive");
    if (successes <= 0) return 1.0;
    if (successes > trials) return 0.0;
    // sum pmf from `successes` to `trials` in log space
    double total = 0.0;
    for (int x = successes; x <= trials; ++x) {
        double logp = std::lgamma(trials + 1.0) - std::lgamma(x + 1.0) -
                      std::lgamma(trials - x + 1.0) + x * std::log(p0) +
                      (trials - x) * std::log1p(-p0);
        total += std::exp(logp);
    }
    return std::min(1.0, total);
}

} // namespace apiguard
