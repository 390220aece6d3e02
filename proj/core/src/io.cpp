#include "apiguard/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "apiguard/errors.hpp"

namespace apiguard {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed on '" + path + "'");
    return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write failed on '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

namespace {

ordered_json parse_json(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw FormatError(e.byte, e.what());
    }
}

ordered_json groum_json(const Groum& g) { return ordered_json::parse(serialize(g)); }

Groum groum_from(const ordered_json& j) { return deserialize(j.dump()); }

ordered_json api_json(const ApiSpec& api) {
    ordered_json j;
    j["name"] = api.name;
    j["types"] = api.types;
    j["methods"] = api.methods;
    return j;
}

ApiSpec api_from(const ordered_json& j) {
    ApiSpec api;
    api.name = j.at("name").get<std::string>();
    for (const auto& t : j.at("types")) api.types.insert(t.get<std::string>());
    for (const auto& m : j.at("methods")) api.methods.insert(m.get<std::string>());
    return api;
}

ordered_json signature_json(const UsageSignature& sig) {
    ordered_json j;
    j["method"] = sig.sourceMethod;
    j["api"] = sig.apiName;
    j["simple"] = sig.simple;
    j["groum"] = groum_json(sig.groum);
    return j;
}

UsageSignature signature_from(const ordered_json& j) {
    UsageSignature sig;
    sig.sourceMethod = j.at("method").get<std::string>();
    sig.apiName = j.at("api").get<std::string>();
    sig.simple = j.at("simple").get<bool>();
    sig.groum = groum_from(j.at("groum"));
    return sig;
}

ordered_json ga_json(const GAConfig& cfg) {
    ordered_json j;
    j["setSize"] = cfg.setSize;
    j["populationSize"] = cfg.populationSize;
    j["generations"] = cfg.generations;
    j["crossoverProb"] = cfg.crossoverProb;
    j["mutationProb"] = cfg.mutationProb;
    j["elitismFraction"] = cfg.elitismFraction;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["bandLow"] = cfg.bandLow;
    j["bandHigh"] = cfg.bandHigh;
    j["offBandCap"] = cfg.offBandCap;
    j["rngSeed"] = cfg.rngSeed;
    return j;
}

GAConfig ga_from(const ordered_json& j) {
    GAConfig cfg;
    cfg.setSize = j.at("setSize").get<int>();
    cfg.populationSize = j.at("populationSize").get<int>();
    cfg.generations = j.at("generations").get<int>();
    cfg.crossoverProb = j.at("crossoverProb").get<double>();
    cfg.mutationProb = j.at("mutationProb").get<double>();
    cfg.elitismFraction = j.at("elitismFraction").get<double>();
    cfg.alpha = j.at("alpha").get<double>();
    cfg.beta = j.at("beta").get<double>();
    cfg.bandLow = j.at("bandLow").get<double>();
    cfg.bandHigh = j.at("bandHigh").get<double>();
    cfg.offBandCap = j.at("offBandCap").get<double>();
    cfg.rngSeed = j.at("rngSeed").get<std::uint64_t>();
    return cfg;
}

template <typename F>
auto guarded(const std::string&, F&& f) {
    try {
        return f();
    } catch (const ordered_json::exception& e) {
        throw FormatError(0, e.what());
    }
}

} // namespace

std::string serialize_self_corpus(const SelfCorpus& corpus) {
    ordered_json j;
    j["api"] = api_json(corpus.api);
    j["signatures"] = ordered_json::array();
    for (const UsageSignature& sig : corpus.signatures)
        j["signatures"].push_back(signature_json(sig));
    return j.dump();
}

SelfCorpus deserialize_self_corpus(const std::string& text) {
    ordered_json j = parse_json(text);
    return guarded(text, [&] {
        SelfCorpus corpus;
        corpus.api = api_from(j.at("api"));
        for (const auto& js : j.at("signatures")) corpus.signatures.push_back(signature_from(js));
        return corpus;
    });
}

std::string serialize_clusters(const std::vector<ScenarioCluster>& clusters) {
    ordered_json arr = ordered_json::array();
    for (const ScenarioCluster& c : clusters) {
        ordered_json j;
        j["id"] = c.id;
        j["methods"] = c.apiMethods;
        ordered_json clients = ordered_json::array();
        for (const UsageSignature& sig : c.clientSignatures) clients.push_back(sig.sourceMethod);
        j["clients"] = std::move(clients);
        arr.push_back(std::move(j));
    }
    return arr.dump();
}

std::vector<ScenarioCluster> deserialize_clusters(const std::string& text,
                                                  const SelfCorpus& corpus) {
    ordered_json arr = parse_json(text);
    if (!arr.is_array()) throw FormatError(0, "clusters must be a top-level array");
    return guarded(text, [&] {
        std::vector<ScenarioCluster> out;
        for (const auto& j : arr) {
            ScenarioCluster c;
            c.id = j.at("id").get<int>();
            for (const auto& m : j.at("methods")) c.apiMethods.insert(m.get<std::string>());
            for (const auto& name : j.at("clients")) {
                std::string method = name.get<std::string>();
                bool found = false;
                for (const UsageSignature& sig : corpus.signatures) {
                    if (sig.sourceMethod == method) {
                        c.clientSignatures.push_back(sig);
                        found = true;
                        break;
                    }
                }
                if (!found) throw FormatError(0, "cluster client '" + method + "' not in corpus");
            }
            out.push_back(std::move(c));
        }
        return out;
    });
}

std::string serialize_detector_file(const DetectorFile& file) {
    ordered_json j;
    j["config"] = ga_json(file.config);
    j["strategy"] = to_string(file.strategy);
    j["simple"] = file.simple;
    j["api"] = api_json(file.api);
    j["detectors"] = ordered_json::array();
    for (const Detector& d : file.detectors.detectors) {
        ordered_json jd;
        jd["origin"] = d.originSignature;
        jd["cluster"] = d.originCluster;
        ordered_json prov = ordered_json::array();
        for (const MutationOp& op : d.provenance) prov.push_back(to_string(op.kind));
        jd["provenance"] = std::move(prov);
        jd["groum"] = groum_json(d.groum);
        j["detectors"].push_back(std::move(jd));
    }
    return j.dump();
}

DetectorFile deserialize_detector_file(const std::string& text) {
    ordered_json j = parse_json(text);
    return guarded(text, [&] {
        DetectorFile file;
        file.config = ga_from(j.at("config"));
        file.strategy = strategy_from_string(j.at("strategy").get<std::string>());
        file.simple = j.at("simple").get<bool>();
        file.api = api_from(j.at("api"));
        for (const auto& jd : j.at("detectors")) {
            Detector d;
            d.originSignature = jd.at("origin").get<std::string>();
            d.originCluster = jd.at("cluster").get<int>();
            for (const auto& op : jd.at("provenance")) {
                MutationKind kind = mutation_kind_from_string(op.get<std::string>());
                d.provenance.push_back(MutationOp{kind, std::string(to_string(kind))});
            }
            d.groum = groum_from(jd.at("groum"));
            d.refresh();
            file.detectors.detectors.push_back(std::move(d));
        }
        return file;
    });
}

std::string serialize_reports(const std::vector<RiskReport>& reports) {
    ordered_json arr = ordered_json::array();
    for (const RiskReport& r : reports) {
        ordered_json j;
        j["rank"] = r.rank;
        j["method"] = r.method;
        j["score"] = r.score;
        j["strategy"] = to_string(r.strategy);
        j["sims"] = r.perDetectorSims;
        arr.push_back(std::move(j));
    }
    return arr.dump();
}

std::vector<RiskReport> deserialize_reports(const std::string& text) {
    ordered_json arr = parse_json(text);
    if (!arr.is_array()) throw FormatError(0, "reports must be a top-level array");
    return guarded(text, [&] {
        std::vector<RiskReport> out;
        for (const auto& j : arr) {
            RiskReport r;
            r.rank = j.at("rank").get<int>();
            r.method = j.at("method").get<std::string>();
            r.score = j.at("score").get<double>();
            r.strategy = risk_strategy_from_string(j.at("strategy").get<std::string>());
            r.perDetectorSims = j.at("sims").get<std::vector<double>>();
            out.push_back(std::move(r));
        }
        return out;
    });
}

std::string render_reports(const std::vector<RiskReport>& reports) {
    std::ostringstream out;
    out << "rank\tscore\tmethod\ttop_detector\n";
    for (const RiskReport& r : reports) {
        std::size_t top = 0;
        for (std::size_t i = 1; i < r.perDetectorSims.size(); ++i)
            if (r.perDetectorSims[i] > r.perDetectorSims[top]) top = i;
        char score[32];
        std::snprintf(score, sizeof score, "%.6f", r.score);
        out << r.rank << '\t' << score << '\t' << r.method << '\t'
            << (r.perDetectorSims.empty() ? -1 : static_cast<int>(top)) << '\n';
    }
    return out.str();
}

namespace {

ordered_json metric_map_json(const std::map<int, double>& m) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : m) j[std::to_string(k)] = v;
    return j;
}

std::map<int, double> metric_map_from(const ordered_json& j) {
    std::map<int, double> m;
    for (const auto& [k, v] : j.items()) m[std::stoi(k)] = v.get<double>();
    return m;
}

} // namespace

std::string serialize_cv_result(const CvResult& result) {
    ordered_json j;
    ordered_json cfg;
    cfg["strategy"] = to_string(result.config.strategy);
    cfg["simple"] = result.config.simpleGroums;
    cfg["risk"] = to_string(result.config.risk);
    cfg["folds"] = result.config.folds;
    cfg["seed"] = result.config.seed;
    cfg["ga"] = ga_json(result.config.ga);
    j["config"] = std::move(cfg);
    j["perFold"] = ordered_json::array();
    for (const FoldResult& f : result.perFold) {
        ordered_json jf;
        jf["testSize"] = f.testSize;
        jf["misuses"] = f.misuses;
        jf["precisionAtK"] = metric_map_json(f.precisionAtK);
        jf["recallAtK"] = metric_map_json(f.recallAtK);
        ordered_json hits = ordered_json::object();
        for (const auto& [k, v] : f.hitsAtK) hits[std::to_string(k)] = v;
        jf["hitsAtK"] = std::move(hits);
        jf["ranked"] = ordered_json::parse(serialize_reports(f.ranked));
        j["perFold"].push_back(std::move(jf));
    }
    j["meanPrecisionAtK"] = metric_map_json(result.meanPrecisionAtK);
    j["meanRecallAtK"] = metric_map_json(result.meanRecallAtK);
    return j.dump();
}

CvResult deserialize_cv_result(const std::string& text) {
    ordered_json j = parse_json(text);
    return guarded(text, [&] {
        CvResult r;
        const auto& cfg = j.at("config");
        r.config.strategy = strategy_from_string(cfg.at("strategy").get<std::string>());
        r.config.simpleGroums = cfg.at("simple").get<bool>();
        r.config.risk = risk_strategy_from_string(cfg.at("risk").get<std::string>());
        r.config.folds = cfg.at("folds").get<int>();
        r.config.seed = cfg.at("seed").get<std::uint64_t>();
        r.config.ga = ga_from(cfg.at("ga"));
        for (const auto& jf : j.at("perFold")) {
            FoldResult f;
            f.testSize = jf.at("testSize").get<int>();
            f.misuses = jf.at("misuses").get<int>();
            f.precisionAtK = metric_map_from(jf.at("precisionAtK"));
            f.recallAtK = metric_map_from(jf.at("recallAtK"));
            for (const auto& [k, v] : jf.at("hitsAtK").items()) f.hitsAtK[std::stoi(k)] = v.get<int>();
            f.ranked = deserialize_reports(jf.at("ranked").dump());
            r.perFold.push_back(std::move(f));
        }
        r.meanPrecisionAtK = metric_map_from(j.at("meanPrecisionAtK"));
        r.meanRecallAtK = metric_map_from(j.at("meanRecallAtK"));
        return r;
    });
}

std::string render_cv_result(const CvResult& result) {
    std::ostringstream out;
    out << "strategy=" << to_string(result.config.strategy)
        << " variant=" << (result.config.simpleGroums ? "simple" : "complex")
        << " risk=" << to_string(result.config.risk) << " folds=" << result.config.folds
        << " seed=" << result.config.seed << "\n\n";
    out << "fold";
    for (const auto& [k, v] : result.meanPrecisionAtK) out << "\tp@" << k << "\tr@" << k;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < result.perFold.size(); ++i) {
        out << i;
        for (const auto& [k, v] : result.perFold[i].precisionAtK) {
            std::snprintf(buf, sizeof buf, "%.4f", v);
            out << '\t' << buf;
            std::snprintf(buf, sizeof buf, "%.4f", result.perFold[i].recallAtK.at(k));
            out << '\t' << buf;
        }
        out << '\n';
    }
    out << "mean";
    for (const auto& [k, v] : result.meanPrecisionAtK) {
        std::snprintf(buf, sizeof buf, "%.4f", v);
        out << '\t' << buf;
        std::snprintf(buf, sizeof buf, "%.4f", result.meanRecallAtK.at(k));
        out << '\t' << buf;
    }
    out << '\n';
    return out.str();
}

} // namespace apiguard
