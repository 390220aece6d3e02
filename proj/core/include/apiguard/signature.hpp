#pragma once

#include <string>
#include <vector>

#include "apiguard/api_spec.hpp"
#include "apiguard/groum.hpp"

namespace apiguard {

/// A groum pruned to one API: the unit compared by similarity.
struct UsageSignature {
    Groum groum;
    std::string apiName;
    std::string sourceMethod;
    bool simple = false; // true = data-dependency edges removed
};

/// The known-correct usages of one API.
struct SelfCorpus {
    ApiSpec api;
    std::vector<UsageSignature> signatures;
};

/// Removes everything not concerned with the API.
///
/// Retains Action nodes matching the spec, and a Control node iff it still
/// governs a retained action (via LoopInclusion/ExceptionScope edges or its
/// recorded body region). Order reachability between retained nodes is
/// preserved: transitive edges are added across removed nodes, then the
/// Order subgraph is transitively reduced. Ids are re-densified preserving
/// relative order. Throws EmptySignature when no node survives.
Groum prune(const Groum& groum, const ApiSpec& spec, const std::string& sourceMethod = "");

UsageSignature extract_signature(const Groum& groum, const ApiSpec& spec,
                                 const std::string& sourceMethod);

/// Drops every DataDep edge and sets the simple flag. Requires a complex input.
UsageSignature simplify(const UsageSignature& sig);

} // namespace apiguard
