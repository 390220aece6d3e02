#pragma once

#include <string>
#include <vector>

#include "apiguard/groum.hpp"
#include "apiguard/signature.hpp"

namespace apiguard {

/// One comparable element of a groum, encoded as a flat tagged string so
/// multisets sort and merge cheaply:
///   "N|label|kind[|controlKind]"   node
///   "C|controlKind"                control structure (control nodes only)
///   "X|exceptionType"              exception handled by a CATCH node
///   "E|type|srcLabel|dstLabel"     edge, keyed by endpoint labels (not ids)
using ElementKey = std::string;

/// Sorted multiset of element keys (duplicates kept).
using ElementBag = std::vector<ElementKey>;

/// Decomposes a groum into its comparable elements: nodes, edges,
/// exceptions and control structures.
ElementBag elements(const Groum& g);

/// Multiset Jaccard over elements(a) and elements(b): |a ⊓ b| / |a ⊔ b|.
/// 1 iff equal multisets, 0 iff disjoint; two empty groums compare as 0.
double sim(const Groum& a, const Groum& b);

/// Same, on precomputed bags (the GA caches bags per groum).
double sim_bags(const ElementBag& a, const ElementBag& b);

/// Variant-checked similarity between signatures; throws MixedVariant
/// when one side is simple and the other complex.
double sim(const UsageSignature& a, const UsageSignature& b);

} // namespace apiguard
