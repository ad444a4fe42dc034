#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "exrec/pipeline.hpp"

namespace exrec {

// |recommended ∩ truth| / |truth|. `truth` must be sorted ascending.
// Throws EmptyGroundTruth.
double recall_at_n(std::span<const Candidate> recommended,
                   std::span<const uint32_t> truth);

struct RecallAggregate {
  double macro = 0.0;
  double micro = 0.0;
};

// Macro = mean of per-case hit ratios; micro = total hits over total
// truth. Throws EmptyCaseList / EmptyGroundTruth.
RecallAggregate aggregate_recall(
    std::span<const std::pair<uint64_t, uint64_t>> cases);

// Exact visit distribution the budgeted short walks approximate: per
// query, the (1-alpha)-discounted power series of the one-step exercise
// transition law, truncated once the weight drops below 1e-9; dead-end
// rows lose their mass (walks stop there). Queries mix evenly; the result
// sums to 1. Throws GraphTooLarge / NoMass / InvalidAlpha.
std::vector<double> stationary_oracle(const TripartiteGraph& graph,
                                      const QuerySet& query, double alpha,
                                      uint32_t max_exercises = 1000);

// Total variation distance between two distributions on the same index
// space.
double total_variation(std::span<const double> p, std::span<const double> q);

struct EvalCase {
  std::string material_id;
  std::string progress_kc;
  std::vector<std::string> query_ids;
};

// `<material_id><TAB><progress_kc><TAB><q1,q2,...>` records.
std::vector<EvalCase> load_cases(const std::filesystem::path& path);

struct EvalOptions {
  PipelineConfig pipeline;         // top_n ignored; the N grid is used
  std::vector<uint32_t> ns = {10, 25, 100};
};

struct EvalReport {
  struct PerN {
    uint32_t n;
    double macro_recall;
    double micro_recall;
  };
  std::string modules;
  std::vector<PerN> recalls;  // ascending by n
  double distinct2 = 0.0;
  bool distinct2_defined = false;
  uint32_t distinct2_pool_n = 0;  // bigrams pool over final sets at this N
  uint64_t case_count = 0;
  uint64_t warning_count = 0;
};

// Runs the configured pipeline for every case; ground truth per case is
// the material's E2 exercises minus the query set. Recall aggregates
// macro and micro per N; Distinct-2 pools bigrams over the final
// recommendation sets at the largest N. Per-case seeds derive from
// (master seed, case index), so the report is independent of `threads`.
EvalReport evaluate(const Stores& stores, std::span<const EvalCase> cases,
                    const EvalOptions& options);

// One line per metric: `<metric>@<N><TAB><value>` with 4 decimals, then
// `distinct2<TAB><value>`, preceded by a `modules<TAB><label>` line.
void print_report(std::ostream& out, const EvalReport& report);

}  // namespace exrec
