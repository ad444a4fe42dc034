#include "exrec/pipeline.hpp"

#include "exrec/errors.hpp"
#include "exrec/text.hpp"

namespace exrec {

void validate(const PipelineConfig& config) {
  validate(config.walk);
  if (config.top_n < 1) {
    throw Error(Errc::invalid_config, "top_n must be >= 1");
  }
  if (config.walk.pool_size < config.top_n) {
    throw Error(Errc::invalid_config,
                "pool_size (" + std::to_string(config.walk.pool_size) +
                    ") must be >= top_n (" + std::to_string(config.top_n) +
                    ")");
  }
  if (!(config.diversity.tau >= 0.0) || !(config.diversity.tau <= 1.0)) {
    throw Error(Errc::invalid_config, "tau must be in [0, 1]");
  }
}

std::string modules_label(const PipelineConfig& config) {
  std::string label = "tg";
  if (config.dp_enabled) label += "+dp";
  if (config.sr_enabled) label += "+sr";
  return label;
}

RecommendationResponse run_pipeline(const Request& request,
                                    const Stores& stores,
                                    const PipelineConfig& config) {
  validate(config);
  const TripartiteGraph& graph = *stores.graph;

  RecommendationResponse response;
  response.request_id = request.id;

  QuerySet query = make_query_set(graph, request.query_ids);

  WalkConfig walk = config.walk;
  walk.seed = derive_seed(config.walk.seed, fnv1a64(request.id));
  VisitCounter counter = run_walks(graph, query, walk, config.threads);
  for (uint32_t skipped : counter.skipped_queries) {
    response.warnings.push_back("query exercise '" +
                                graph.exercise_id(skipped) +
                                "' has no incident edges; skipped");
  }

  CandidateList candidates =
      top_candidates(counter, walk.pool_size, query.exercises);
  response.tally.generated = static_cast<uint32_t>(candidates.entries.size());

  if (config.dp_enabled) {
    DedupeResult deduped =
        dedupe(candidates, *stores.embeddings, config.diversity.tau);
    if (deduped.missing_embeddings > 0) {
      response.warnings.push_back(
          std::to_string(deduped.missing_embeddings) +
          " candidate(s) kept without a usable embedding");
    }
    candidates = std::move(deduped.list);
  }
  response.tally.after_dp = static_cast<uint32_t>(candidates.entries.size());

  if (config.sr_enabled) {
    RestrictResult restricted = restrict_candidates(
        candidates, graph, *stores.syllabus, Progress{request.progress_kc});
    candidates = std::move(restricted.list);
    if (candidates.entries.empty()) {
      response.warnings.push_back("no candidate within syllabus scope");
    }
  }
  response.tally.after_sr = static_cast<uint32_t>(candidates.entries.size());

  const uint32_t top_n = request.top_n > 0 ? request.top_n : config.top_n;
  if (candidates.entries.size() > top_n) candidates.entries.resize(top_n);
  candidates.stage = Stage::Final;
  response.tally.final_count =
      static_cast<uint32_t>(candidates.entries.size());

  response.entries.reserve(candidates.entries.size());
  for (const Candidate& candidate : candidates.entries) {
    response.entries.emplace_back(graph.exercise_id(candidate.exercise),
                                  candidate.score);
  }
  return response;
}

std::string format_response(const RecommendationResponse& response) {
  std::string line = response.request_id;
  line += '\t';
  for (size_t i = 0; i < response.entries.size(); ++i) {
    if (i > 0) line += ',';
    line += response.entries[i].first;
    line += ':';
    line += std::to_string(response.entries[i].second);
  }
  line += '\t';
  line += std::to_string(response.tally.generated);
  line += '/';
  line += std::to_string(response.tally.after_dp);
  line += '/';
  line += std::to_string(response.tally.after_sr);
  return line;
}

}  // namespace exrec
