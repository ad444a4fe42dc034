#include "exrec/walker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_set>

#include "exrec/errors.hpp"

namespace exrec {

void validate(const WalkConfig& config) {
  if (!(config.alpha > 0.0) || !(config.alpha <= 1.0)) {
    throw Error(Errc::invalid_alpha,
                "alpha must be in (0, 1], got " + std::to_string(config.alpha));
  }
  if (config.total_steps < 1) {
    throw Error(Errc::invalid_config, "total_steps must be >= 1");
  }
  if (config.pool_size < 1) {
    throw Error(Errc::invalid_config, "pool_size must be >= 1");
  }
}

QuerySet make_query_set(const TripartiteGraph& graph,
                        std::span<const std::string> exercise_ids) {
  if (exercise_ids.empty()) {
    throw Error(Errc::empty_query, "query set is empty");
  }
  QuerySet query;
  std::unordered_set<uint32_t> seen;
  for (const std::string& id : exercise_ids) {
    auto index = graph.exercise_index(id);
    if (!index) {
      throw Error(Errc::unknown_node,
                  "query exercise '" + id + "' not in graph");
    }
    if (seen.insert(*index).second) query.exercises.push_back(*index);
  }
  return query;
}

uint64_t sample_walk_length(double alpha, Rng& rng) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw Error(Errc::invalid_alpha,
                "alpha must be in (0, 1], got " + std::to_string(alpha));
  }
  double u = rng.uniform01();
  if (alpha >= 1.0) return 1;
  // Inverse CDF of the geometric law; log1p(-u) <= 0, log1p(-alpha) < 0.
  double steps = std::floor(std::log1p(-u) / std::log1p(-alpha));
  if (!(steps >= 0.0)) return 1;
  if (steps >= 9.0e18) return std::numeric_limits<uint64_t>::max();
  return 1 + static_cast<uint64_t>(steps);
}

std::optional<uint32_t> random_step(const TripartiteGraph& graph,
                                    uint32_t current, Rng& rng) {
  std::span<const uint32_t> kcs = graph.kcs_of(current);
  std::span<const uint32_t> materials = graph.materials_of(current);
  const uint64_t degree = kcs.size() + materials.size();
  if (degree == 0) return std::nullopt;
  const uint64_t pick = rng.bounded(degree);
  std::span<const uint32_t> exercises =
      pick < kcs.size()
          ? graph.kc_exercises(kcs[pick])
          : graph.material_exercises(materials[pick - kcs.size()]);
  // A pivot reached through an incident edge always lists that edge's
  // exercise, so this row is non-empty here.
  return exercises[rng.bounded(exercises.size())];
}

namespace {

struct QueryTask {
  uint32_t start;
  uint64_t budget;
  uint64_t seed;
};

void walk_one_query(const TripartiteGraph& graph, const QueryTask& task,
                    double alpha, std::vector<uint64_t>& counts,
                    uint64_t& executed, bool& skipped) {
  Rng rng(task.seed);
  if (graph.exercise_degree(task.start) == 0) {
    skipped = true;
    return;
  }
  uint64_t remaining = task.budget;
  while (remaining > 0) {
    uint64_t length = sample_walk_length(alpha, rng);
    length = std::min(length, remaining);
    uint32_t current = task.start;
    for (uint64_t step = 0; step < length; ++step) {
      auto next = random_step(graph, current, rng);
      if (!next) break;  // dead end mid-walk; executed steps stay counted
      current = *next;
      ++counts[current];
      ++executed;
      --remaining;
    }
  }
}

}  // namespace

VisitCounter run_walks(const TripartiteGraph& graph, const QuerySet& query,
                       const WalkConfig& config, unsigned threads) {
  validate(config);
  if (query.exercises.empty()) {
    throw Error(Errc::empty_query, "query set is empty");
  }
  for (uint32_t exercise : query.exercises) {
    if (exercise >= graph.exercise_count()) {
      throw Error(Errc::unknown_node, "query exercise index out of range");
    }
  }

  const size_t n_queries = query.exercises.size();
  std::vector<QueryTask> tasks(n_queries);
  const uint64_t share = config.total_steps / n_queries;
  const uint64_t remainder = config.total_steps % n_queries;
  for (size_t i = 0; i < n_queries; ++i) {
    tasks[i].start = query.exercises[i];
    tasks[i].budget = share + (i < remainder ? 1 : 0);
    tasks[i].seed = derive_seed(config.seed, static_cast<uint64_t>(i));
  }

  const size_t n_exercises = graph.exercise_count();
  std::vector<uint64_t> per_query_executed(n_queries, 0);
  std::vector<char> per_query_skipped(n_queries, 0);

  if (threads <= 1 || n_queries == 1) {
    VisitCounter counter;
    counter.counts.assign(n_exercises, 0);
    for (size_t i = 0; i < n_queries; ++i) {
      bool skipped = false;
      walk_one_query(graph, tasks[i], config.alpha, counter.counts,
                     per_query_executed[i], skipped);
      per_query_skipped[i] = skipped;
    }
    for (size_t i = 0; i < n_queries; ++i) {
      counter.executed_steps += per_query_executed[i];
      if (per_query_skipped[i]) counter.skipped_queries.push_back(tasks[i].start);
    }
    return counter;
  }

  const size_t n_workers = std::min<size_t>(threads, n_queries);
  std::vector<std::vector<uint64_t>> partial(n_workers);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (size_t w = 0; w < n_workers; ++w) {
    pool.emplace_back([&, w] {
      partial[w].assign(n_exercises, 0);
      for (size_t i = w; i < n_queries; i += n_workers) {
        bool skipped = false;
        walk_one_query(graph, tasks[i], config.alpha, partial[w],
                       per_query_executed[i], skipped);
        per_query_skipped[i] = skipped;
      }
    });
  }
  for (auto& worker : pool) worker.join();

  // Pointwise merge; integer addition is order-independent, so the result
  // matches the single-thread path exactly.
  VisitCounter counter;
  counter.counts.assign(n_exercises, 0);
  for (const auto& local : partial) {
    for (size_t e = 0; e < n_exercises; ++e) counter.counts[e] += local[e];
  }
  for (size_t i = 0; i < n_queries; ++i) {
    counter.executed_steps += per_query_executed[i];
    if (per_query_skipped[i]) counter.skipped_queries.push_back(tasks[i].start);
  }
  return counter;
}

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::Generated:
      return "generated";
    case Stage::AfterDp:
      return "after_dp";
    case Stage::AfterSr:
      return "after_sr";
    case Stage::Final:
      return "final";
  }
  return "?";
}

CandidateList top_candidates(const VisitCounter& counter, uint32_t pool_size,
                             std::span<const uint32_t> exclusions) {
  if (pool_size < 1) {
    throw Error(Errc::invalid_config, "pool_size must be >= 1");
  }
  std::unordered_set<uint32_t> excluded(exclusions.begin(), exclusions.end());
  CandidateList list;
  list.stage = Stage::Generated;
  for (uint32_t e = 0; e < counter.counts.size(); ++e) {
    if (counter.counts[e] == 0 || excluded.contains(e)) continue;
    list.entries.push_back({e, counter.counts[e]});
  }
  // Exercise indexes follow id order, so ascending index breaks ties
  // ascending by id text.
  std::stable_sort(list.entries.begin(), list.entries.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.exercise < b.exercise;
                   });
  if (list.entries.size() > pool_size) list.entries.resize(pool_size);
  return list;
}

}  // namespace exrec
