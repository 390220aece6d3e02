#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "apiguard/detection.hpp"
#include "apiguard/detector.hpp"
#include "apiguard/errors.hpp"
#include "apiguard/eval.hpp"
#include "apiguard/io.hpp"
#include "apiguard/usage_lang.hpp"

namespace {

using namespace apiguard;

int default_jobs() {
    if (const char* env = std::getenv("APIGUARD_JOBS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

/// Parses one .usage file and appends the API signatures of its methods.
/// Methods with no API usage are skipped.
void extract_file(const std::string& path, const ApiSpec& api, bool simple,
                  std::vector<UsageSignature>& out) {
    lang::UsageProgram program = lang::parse(read_file(path));
    std::string stem = stem_of(path);
    for (const lang::MethodDecl& m : program.methods) {
        Groum g = lang::build_groum(m);
        try {
            UsageSignature sig = extract_signature(g, api, stem + "." + m.name);
            out.push_back(simple ? simplify(sig) : sig);
        } catch (const EmptySignature&) {
        }
    }
}

struct GaFlags {
    void attach(CLI::App* cmd) {
        cmd->add_option("--set-size", cfg.setSize, "Detectors per set");
        cmd->add_option("--population", cfg.populationSize, "Detector sets per generation");
        cmd->add_option("--generations", cfg.generations, "GA generations");
        cmd->add_option("--crossover", cfg.crossoverProb, "Crossover probability");
        cmd->add_option("--mutation", cfg.mutationProb, "Mutation probability");
        cmd->add_option("--elitism", cfg.elitismFraction, "Elite fraction carried over");
        cmd->add_option("--alpha", cfg.alpha, "Weight of the client distance term");
        cmd->add_option("--beta", cfg.beta, "Weight of the detector distance term");
        cmd->add_option("--band-low", cfg.bandLow, "Lower edge of the full-reward band");
        cmd->add_option("--band-high", cfg.bandHigh, "Upper edge of the full-reward band");
        cmd->add_option("--cap", cfg.offBandCap, "Off-band reward cap");
    }
    GAConfig cfg;
};

int run(int argc, char** argv) {
    CLI::App app{"Immune-inspired API misuse detector"};
    app.require_subcommand(1);
    int jobs = default_jobs();
    app.add_option("--jobs", jobs, "Worker parallelism cap")->check(CLI::PositiveNumber);

    // extract
    auto* extract = app.add_subcommand("extract", "Parse .usage files into an API signature corpus");
    std::string apiPath, outPath, apiName;
    std::vector<std::string> usagePaths;
    bool simple = false;
    extract->add_option("--api", apiPath, "API spec file")->required();
    extract->add_option("files", usagePaths, "Usage source files")->required();
    extract->add_option("--out", outPath, "Output corpus path")->required();
    extract->add_option("--name", apiName, "API name (default: spec file stem)");
    extract->add_flag("--simple", simple, "Drop data-dependency edges");

    // prune
    auto* prune_cmd = app.add_subcommand("prune", "Prune a serialized groum to one API");
    std::string pruneIn;
    prune_cmd->add_option("--api", apiPath, "API spec file")->required();
    prune_cmd->add_option("--in", pruneIn, "Groum JSON file")->required();
    prune_cmd->add_option("--out", outPath, "Output groum path")->required();

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Group API methods by co-usage");
    std::string selfPath;
    double eps = 0.8;
    int minPts = 2;
    cluster->add_option("--self", selfPath, "Signature corpus")->required();
    cluster->add_option("--out", outPath, "Output clusters path")->required();
    cluster->add_option("--eps", eps, "DBSCAN radius");
    cluster->add_option("--min-pts", minPts, "DBSCAN core threshold");

    // generate
    auto* generate = app.add_subcommand("generate", "Evolve a detector set from a self corpus");
    std::string strategyName = "global";
    std::uint64_t seed = 0;
    GaFlags genGa;
    generate->add_option("--self", selfPath, "Signature corpus")->required();
    generate->add_option("--strategy", strategyName, "parallel | global | no-cluster");
    generate->add_option("--seed", seed, "RNG seed")->required();
    generate->add_option("--out", outPath, "Output detector file")->required();
    genGa.attach(generate);

    // score
    auto* score = app.add_subcommand("score", "Rank usage files by misuse risk");
    std::string detectorPath, riskName = "max";
    score->add_option("--detectors", detectorPath, "Detector file")->required();
    score->add_option("--in", usagePaths, "Usage source files")->required();
    score->add_option("--risk", riskName, "max | noisy-or");
    score->add_option("--out", outPath, "Optional report path (default: stdout)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Cross-validate the pipeline with injected misuses");
    int folds = 10;
    GaFlags evalGa;
    evaluate->add_option("--self", selfPath, "Signature corpus of good uses")->required();
    evaluate->add_option("--strategy", strategyName, "parallel | global | no-cluster");
    evaluate->add_option("--risk", riskName, "max | noisy-or");
    evaluate->add_option("--seed", seed, "RNG seed")->required();
    evaluate->add_option("--folds", folds, "Cross-validation folds");
    evaluate->add_flag("--simple", simple, "Use simple groums");
    evaluate->add_option("--out", outPath, "Output result path")->required();
    evalGa.attach(evaluate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (extract->parsed()) {
        ApiSpec api = parse_api_spec(read_file(apiPath),
                                     apiName.empty() ? stem_of(apiPath) : apiName);
        SelfCorpus corpus;
        corpus.api = api;
        for (const std::string& p : usagePaths) extract_file(p, api, simple, corpus.signatures);
        write_file_atomic(outPath, serialize_self_corpus(corpus));
    } else if (prune_cmd->parsed()) {
        ApiSpec api = parse_api_spec(read_file(apiPath), stem_of(apiPath));
        Groum g = deserialize(read_file(pruneIn));
        write_file_atomic(outPath, serialize(prune(g, api, stem_of(pruneIn))));
    } else if (cluster->parsed()) {
        SelfCorpus corpus = deserialize_self_corpus(read_file(selfPath));
        write_file_atomic(outPath, serialize_clusters(derive_clusters(corpus, eps, minPts)));
    } else if (generate->parsed()) {
        SelfCorpus corpus = deserialize_self_corpus(read_file(selfPath));
        DetectorFile file;
        file.strategy = strategy_from_string(strategyName);
        file.config = genGa.cfg;
        file.config.rngSeed = seed;
        file.config.jobs = jobs;
        file.simple = !corpus.signatures.empty() && corpus.signatures.front().simple;
        file.api = corpus.api;
        file.detectors = generate_detectors(corpus, file.strategy, file.config);
        write_file_atomic(outPath, serialize_detector_file(file));
    } else if (score->parsed()) {
        DetectorFile file = deserialize_detector_file(read_file(detectorPath));
        std::vector<UsageSignature> candidates;
        for (const std::string& p : usagePaths)
            extract_file(p, file.api, file.simple, candidates);
        std::vector<RiskReport> reports =
            rank(candidates, file.detectors, file.simple, risk_strategy_from_string(riskName));
        std::string rendered = render_reports(reports);
        if (outPath.empty())
            std::cout << rendered;
        else
            write_file_atomic(outPath, rendered);
    } else if (evaluate->parsed()) {
        SelfCorpus corpus = deserialize_self_corpus(read_file(selfPath));
        PipelineConfig cfg;
        cfg.strategy = strategy_from_string(strategyName);
        cfg.simpleGroums = simple;
        cfg.risk = risk_strategy_from_string(riskName);
        cfg.ga = evalGa.cfg;
        cfg.ga.jobs = jobs;
        cfg.folds = folds;
        cfg.seed = seed;

        std::vector<LabeledCase> cases;
        for (const UsageSignature& sig : corpus.signatures)
            cases.push_back(LabeledCase{sig, CaseLabel::GoodUse, std::nullopt});
        Rng injectRng = Rng(seed).split(7);
        const MisuseKind kinds[] = {MisuseKind::MissingCall, MisuseKind::MissingExceptionHandling,
                                    MisuseKind::MissingConditionOrState, MisuseKind::SwappedOrder};
        for (std::size_t i = 0; i < corpus.signatures.size(); ++i) {
            for (std::size_t offset = 0; offset < 4; ++offset) {
                try {
                    cases.push_back(
                        inject_misuse(corpus.signatures[i], kinds[(i + offset) % 4], injectRng));
                    break;
                } catch (const Inapplicable&) {
                }
            }
        }
        CvResult result = run_cv(cases, corpus.api, cfg);
        write_file_atomic(outPath, serialize_cv_result(result));
        std::cout << render_cv_result(result);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const apiguard::DomainError& e) {
        std::cerr << e.name() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
