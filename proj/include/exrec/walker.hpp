#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "exrec/graph.hpp"
#include "exrec/rng.hpp"

namespace exrec {

struct WalkConfig {
  double alpha = 0.04;          // per-step termination probability
  uint64_t total_steps = 100000;  // global step budget across all walks
  uint32_t pool_size = 100;     // candidates handed to the filters
  uint64_t seed = 0;            // master PRNG seed
};

// Throws InvalidAlpha / InvalidConfig on out-of-range fields.
void validate(const WalkConfig& config);

// Ordered, duplicate-free starting exercises, held as graph indexes.
struct QuerySet {
  std::vector<uint32_t> exercises;
};

// Validates ids against the graph (UnknownNode / EmptyQuery) and drops
// repeated ids, keeping first occurrence order.
QuerySet make_query_set(const TripartiteGraph& graph,
                        std::span<const std::string> exercise_ids);

struct VisitCounter {
  std::vector<uint64_t> counts;  // per exercise index
  uint64_t executed_steps = 0;
  // Query exercises skipped because they had no incident edges.
  std::vector<uint32_t> skipped_queries;

  bool operator==(const VisitCounter&) const = default;
};

// Geometric walk length: P(L = l) = alpha * (1 - alpha)^(l-1), via inverse
// CDF, one RNG draw per call. Throws InvalidAlpha.
uint64_t sample_walk_length(double alpha, Rng& rng);

// One walk step from `current`: picks an incident edge uniformly (KC or
// material pivot), then an exercise of that pivot uniformly. Returns
// nullopt at a dead end (no incident edges). Consumes exactly two RNG
// draws on success, none on a dead end.
std::optional<uint32_t> random_step(const TripartiteGraph& graph,
                                    uint32_t current, Rng& rng);

// Budgeted short walks from every query exercise. The step budget splits
// evenly across queries (remainder to the earliest); each query owns an
// independent substream derived from (seed, query position), so results
// do not depend on `threads`.
VisitCounter run_walks(const TripartiteGraph& graph, const QuerySet& query,
                       const WalkConfig& config, unsigned threads = 1);

struct Candidate {
  uint32_t exercise;
  uint64_t score;

  bool operator==(const Candidate&) const = default;
};

enum class Stage { Generated, AfterDp, AfterSr, Final };

const char* stage_name(Stage stage);

struct CandidateList {
  std::vector<Candidate> entries;  // score-descending, id-ascending ties
  Stage stage = Stage::Generated;
};

// Visited exercises minus exclusions, sorted by (count desc, id asc),
// truncated to pool_size.
CandidateList top_candidates(const VisitCounter& counter, uint32_t pool_size,
                             std::span<const uint32_t> exclusions);

}  // namespace exrec
