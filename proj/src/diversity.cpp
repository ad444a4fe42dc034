#include "exrec/diversity.hpp"

#include <cmath>
#include <unordered_set>

#include "exrec/errors.hpp"

namespace exrec {

namespace {

bool is_zero(const std::vector<double>& v) {
  for (double component : v) {
    if (component != 0.0) return false;
  }
  return true;
}

}  // namespace

DedupeResult dedupe(const CandidateList& candidates,
                    const EmbeddingTable& table, double tau) {
  if (!(tau >= 0.0) || !(tau <= 1.0)) {
    throw Error(Errc::invalid_config,
                "tau must be in [0, 1], got " + std::to_string(tau));
  }
  DedupeResult result;
  result.list.stage = Stage::AfterDp;
  // A candidate is compared against every earlier candidate with a usable
  // embedding, dropped or not. The comparison set is therefore independent
  // of tau, which makes retention monotone in tau; comparing only against
  // retained candidates would let a dropped candidate's survivors shadow
  // differently as tau moves.
  std::vector<std::vector<double>> earlier_vectors;
  for (const Candidate& candidate : candidates.entries) {
    auto vector = table.vector_for(candidate.exercise);
    if (!vector || is_zero(*vector)) {
      ++result.missing_embeddings;
      result.list.entries.push_back(candidate);
      continue;
    }
    bool near_duplicate = false;
    for (const auto& seen : earlier_vectors) {
      if (cosine(*vector, seen) > tau) {
        near_duplicate = true;
        break;
      }
    }
    if (!near_duplicate) result.list.entries.push_back(candidate);
    earlier_vectors.push_back(std::move(*vector));
  }
  return result;
}

double distinct_2(const std::vector<std::vector<std::string>>& texts) {
  uint64_t total = 0;
  std::unordered_set<std::string> seen;
  for (const auto& tokens : texts) {
    for (size_t i = 0; i + 1 < tokens.size(); ++i) {
      ++total;
      // \x1f as pair separator; tokens are whitespace-free.
      seen.insert(tokens[i] + '\x1f' + tokens[i + 1]);
    }
  }
  if (total == 0) {
    throw Error(Errc::no_bigrams, "no text yields a bigram");
  }
  return static_cast<double>(seen.size()) / static_cast<double>(total);
}

}  // namespace exrec
