#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "apiguard/errors.hpp"
#include "apiguard/io.hpp"
#include "support/corpus.hpp"

using namespace apiguard;
using namespace apiguard::testsupport;

TEST_SUITE("io") {

TEST_CASE("self corpus round trip") {
    SelfCorpus corpus = make_session_corpus(10, 2);
    std::string text = serialize_self_corpus(corpus);
    SelfCorpus back = deserialize_self_corpus(text);
    CHECK(back.api.name == corpus.api.name);
    CHECK(back.api.types == corpus.api.types);
    REQUIRE(back.signatures.size() == corpus.signatures.size());
    for (std::size_t i = 0; i < back.signatures.size(); ++i) {
        CHECK(back.signatures[i].sourceMethod == corpus.signatures[i].sourceMethod);
        CHECK(back.signatures[i].groum == corpus.signatures[i].groum);
        CHECK(back.signatures[i].simple == corpus.signatures[i].simple);
    }
    CHECK(serialize_self_corpus(back) == text);
}

TEST_CASE("cluster round trip") {
    SelfCorpus corpus = make_session_corpus(10, 2);
    auto clusters = derive_clusters(corpus);
    std::string text = serialize_clusters(clusters);
    auto back = deserialize_clusters(text, corpus);
    REQUIRE(back.size() == clusters.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].id == clusters[i].id);
        CHECK(back[i].apiMethods == clusters[i].apiMethods);
        CHECK(back[i].clientSignatures.size() == clusters[i].clientSignatures.size());
    }
}

TEST_CASE("detector file embeds config and variant") {
    SelfCorpus corpus = make_session_corpus(8, 2);
    DetectorFile file;
    file.config.setSize = 3;
    file.config.populationSize = 3;
    file.config.generations = 2;
    file.config.rngSeed = 5;
    file.strategy = GenerationStrategy::NoCluster;
    file.simple = false;
    file.api = corpus.api;
    file.detectors = generate_detectors(corpus, file.strategy, file.config);
    std::string text = serialize_detector_file(file);
    DetectorFile back = deserialize_detector_file(text);
    CHECK(back.config.rngSeed == 5);
    CHECK(back.strategy == GenerationStrategy::NoCluster);
    CHECK(back.simple == false);
    REQUIRE(back.detectors.size() == file.detectors.size());
    for (std::size_t i = 0; i < back.detectors.size(); ++i) {
        CHECK(back.detectors.detectors[i].key == file.detectors.detectors[i].key);
        CHECK(back.detectors.detectors[i].provenance.size() ==
              file.detectors.detectors[i].provenance.size());
    }
    CHECK(serialize_detector_file(back) == text);
}

TEST_CASE("report serialization and rendering") {
    std::vector<RiskReport> reports = {
        RiskReport{"m1", 0.9, {0.9, 0.1}, RiskStrategy::Max, 1},
        RiskReport{"m2", 0.4, {0.2, 0.4}, RiskStrategy::Max, 2},
    };
    auto back = deserialize_reports(serialize_reports(reports));
    REQUIRE(back.size() == 2);
    CHECK(back[0].method == "m1");
    CHECK(back[0].score == 0.9);
    CHECK(back[1].perDetectorSims == std::vector<double>{0.2, 0.4});
    std::string table = render_reports(reports);
    CHECK(table.find("rank\tscore\tmethod\ttop_detector") == 0);
    CHECK(table.find("1\t0.900000\tm1\t0") != std::string::npos);
    CHECK(table.find("2\t0.400000\tm2\t1") != std::string::npos);
}

TEST_CASE("cv result round trip") {
    auto cases = make_labeled_cases(make_session_corpus(12, 3), 3);
    PipelineConfig cfg;
    cfg.strategy = GenerationStrategy::NoCluster;
    cfg.folds = 3;
    cfg.seed = 9;
    cfg.ga.setSize = 3;
    cfg.ga.populationSize = 3;
    cfg.ga.generations = 1;
    CvResult result = run_cv(cases, session_api(), cfg);
    std::string text = serialize_cv_result(result);
    CvResult back = deserialize_cv_result(text);
    CHECK(back.meanPrecisionAtK == result.meanPrecisionAtK);
    CHECK(back.meanRecallAtK == result.meanRecallAtK);
    REQUIRE(back.perFold.size() == result.perFold.size());
    for (std::size_t i = 0; i < back.perFold.size(); ++i)
        CHECK(back.perFold[i].hitsAtK == result.perFold[i].hitsAtK);
    CHECK(serialize_cv_result(back) == text);
    std::string table = render_cv_result(result);
    CHECK(table.find("mean") != std::string::npos);
}

TEST_CASE("malformed input reports a byte offset") {
    CHECK_THROWS_AS(deserialize_self_corpus("{\"api\":"), FormatError);
    CHECK_THROWS_AS(deserialize_detector_file("[]"), FormatError);
}

TEST_CASE("atomic write leaves no temp file") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "apiguard-io-test";
    fs::create_directories(dir);
    fs::path target = dir / "out.json";
    write_file_atomic(target.string(), "hello");
    CHECK(read_file(target.string()) == "hello");
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));
    write_file_atomic(target.string(), "world");
    CHECK(read_file(target.string()) == "world");
    fs::remove_all(dir);
}

TEST_CASE("missing file raises IoError") {
    CHECK_THROWS_AS(read_file("/nonexistent/apiguard/file.json"), IoError);
}

} // TEST_SUITE
