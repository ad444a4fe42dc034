#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exrec/embedding.hpp"
#include "exrec/walker.hpp"

namespace exrec {

struct DiversityConfig {
  double tau = 0.9;  // similarity threshold; pairs above it collapse
};

struct DedupeResult {
  CandidateList list;
  // Candidates kept because no usable embedding existed for them.
  uint32_t missing_embeddings = 0;
};

// Greedy near-duplicate filter in candidate order (highest score first):
// drops a candidate iff its cosine similarity to any earlier candidate
// exceeds tau (strictly), so the higher-scoring member of a similar pair
// always survives the comparison and retention is monotone in tau.
// Candidates without a usable embedding are retained and excluded from
// comparisons.
DedupeResult dedupe(const CandidateList& candidates,
                    const EmbeddingTable& table, double tau);

// Ratio of distinct token bigrams to total bigram occurrences; bigrams
// never span two texts. Throws NoBigrams when no text has length >= 2.
double distinct_2(const std::vector<std::vector<std::string>>& texts);

}  // namespace exrec
