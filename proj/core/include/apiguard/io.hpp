#pragma once

#include <string>
#include <vector>

#include "apiguard/clustering.hpp"
#include "apiguard/detection.hpp"
#include "apiguard/detector.hpp"
#include "apiguard/eval.hpp"
#include "apiguard/signature.hpp"

namespace apiguard {

/// Whole-file read. Throws IoError.
std::string read_file(const std::string& path);

/// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

// Canonical JSON forms. Each deserializer throws FormatError with the byte
// offset of the first problem.

std::string serialize_self_corpus(const SelfCorpus& corpus);
SelfCorpus deserialize_self_corpus(const std::string& text);

std::string serialize_clusters(const std::vector<ScenarioCluster>& clusters);
std::vector<ScenarioCluster> deserialize_clusters(const std::string& text,
                                                  const SelfCorpus& corpus);

/// Bundle persisted by `generate` and consumed by `score`: the detector set
/// plus the GAConfig, groum variant and API that produced it, so scoring
/// needs no other inputs.
struct DetectorFile {
    DetectorSet detectors;
    GAConfig config;
    GenerationStrategy strategy = GenerationStrategy::Global;
    bool simple = false;
    ApiSpec api;
};

std::string serialize_detector_file(const DetectorFile& file);
DetectorFile deserialize_detector_file(const std::string& text);

std::string serialize_reports(const std::vector<RiskReport>& reports);
std::vector<RiskReport> deserialize_reports(const std::string& text);

/// Tab-separated rank table: rank, score, method, index of the strongest
/// detector.
std::string render_reports(const std::vector<RiskReport>& reports);

std::string serialize_cv_result(const CvResult& result);
CvResult deserialize_cv_result(const std::string& text);

/// Plain-text summary: one row per fold plus the means.
std::string render_cv_result(const CvResult& result);

} // namespace apiguard
