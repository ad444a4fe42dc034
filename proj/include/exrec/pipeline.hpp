#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "exrec/corpus.hpp"
#include "exrec/diversity.hpp"
#include "exrec/embedding.hpp"
#include "exrec/graph.hpp"
#include "exrec/scope.hpp"
#include "exrec/walker.hpp"

namespace exrec {

struct PipelineConfig {
  WalkConfig walk;
  bool dp_enabled = false;
  DiversityConfig diversity;
  bool sr_enabled = false;
  uint32_t top_n = 25;
  unsigned threads = 1;
};

// Throws InvalidConfig when pool_size < top_n or top_n == 0, plus the
// WalkConfig checks.
void validate(const PipelineConfig& config);

// "tg", "tg+dp", "tg+sr" or "tg+dp+sr".
std::string modules_label(const PipelineConfig& config);

// Everything a request needs, loaded once and never mutated afterwards.
struct Stores {
  const TripartiteGraph* graph = nullptr;
  const Corpus* corpus = nullptr;
  const EmbeddingTable* embeddings = nullptr;
  const SyllabusOrder* syllabus = nullptr;
};

struct Request {
  std::string id;
  std::vector<std::string> query_ids;
  std::string progress_kc;
  uint32_t top_n = 0;  // 0 = take PipelineConfig::top_n
};

struct StageTally {
  uint32_t generated = 0;
  uint32_t after_dp = 0;
  uint32_t after_sr = 0;
  uint32_t final_count = 0;
};

struct RecommendationResponse {
  std::string request_id;
  std::vector<std::pair<std::string, uint64_t>> entries;  // (exercise, score)
  StageTally tally;
  std::vector<std::string> warnings;
};

// Candidate generation, then the optional diversity and scope filters,
// then truncation to top_n. The walk seed derives from (config seed,
// fnv1a64(request id)), so responses do not depend on request order.
RecommendationResponse run_pipeline(const Request& request,
                                    const Stores& stores,
                                    const PipelineConfig& config);

// Wire format helpers shared by batch `recommend` and `serve`:
// response  ::= <request_id> TAB <ex>:<score>,... TAB <gen>/<dp>/<sr>
std::string format_response(const RecommendationResponse& response);

}  // namespace exrec
