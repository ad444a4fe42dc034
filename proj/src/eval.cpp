#include "exrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <thread>

#include "exrec/errors.hpp"
#include "exrec/lineio.hpp"
#include "exrec/text.hpp"

namespace exrec {

double recall_at_n(std::span<const Candidate> recommended,
                   std::span<const uint32_t> truth) {
  if (truth.empty()) {
    throw Error(Errc::empty_ground_truth, "ground truth is empty");
  }
  uint64_t hits = 0;
  for (const Candidate& candidate : recommended) {
    if (std::binary_search(truth.begin(), truth.end(), candidate.exercise)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

RecallAggregate aggregate_recall(
    std::span<const std::pair<uint64_t, uint64_t>> cases) {
  if (cases.empty()) {
    throw Error(Errc::empty_case_list, "no cases to aggregate");
  }
  double ratio_sum = 0.0;
  uint64_t hit_sum = 0;
  uint64_t truth_sum = 0;
  for (const auto& [hits, truth_size] : cases) {
    if (truth_size == 0) {
      throw Error(Errc::empty_ground_truth, "case with empty ground truth");
    }
    ratio_sum += static_cast<double>(hits) / static_cast<double>(truth_size);
    hit_sum += hits;
    truth_sum += truth_size;
  }
  RecallAggregate aggregate;
  aggregate.macro = ratio_sum / static_cast<double>(cases.size());
  aggregate.micro =
      static_cast<double>(hit_sum) / static_cast<double>(truth_sum);
  return aggregate;
}

std::vector<double> stationary_oracle(const TripartiteGraph& graph,
                                      const QuerySet& query, double alpha,
                                      uint32_t max_exercises) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw Error(Errc::invalid_alpha,
                "oracle alpha must be in (0, 1), got " +
                    std::to_string(alpha));
  }
  const uint32_t n = graph.exercise_count();
  if (n > max_exercises) {
    throw Error(Errc::graph_too_large,
                std::to_string(n) + " exercises exceeds oracle cap of " +
                    std::to_string(max_exercises));
  }
  if (query.exercises.empty()) {
    throw Error(Errc::empty_query, "query set is empty");
  }

  // One-step exercise-to-exercise law: uniform over incident edges, then
  // uniform over the chosen pivot's exercise row. Dead-end rows stay
  // empty; their mass leaves the system like a walk ending early.
  std::vector<std::vector<std::pair<uint32_t, double>>> transition(n);
  for (uint32_t q = 0; q < n; ++q) {
    const auto kcs = graph.kcs_of(q);
    const auto materials = graph.materials_of(q);
    const size_t degree = kcs.size() + materials.size();
    if (degree == 0) continue;
    std::vector<double> dense(n, 0.0);
    const double pivot_weight = 1.0 / static_cast<double>(degree);
    for (uint32_t kc : kcs) {
      const auto row = graph.kc_exercises(kc);
      const double w = pivot_weight / static_cast<double>(row.size());
      for (uint32_t e : row) dense[e] += w;
    }
    for (uint32_t material : materials) {
      const auto row = graph.material_exercises(material);
      const double w = pivot_weight / static_cast<double>(row.size());
      for (uint32_t e : row) dense[e] += w;
    }
    for (uint32_t e = 0; e < n; ++e) {
      if (dense[e] > 0.0) transition[q].emplace_back(e, dense[e]);
    }
  }

  std::vector<double> mixture(n, 0.0);
  std::vector<double> current(n), next(n), series(n);
  for (uint32_t start : query.exercises) {
    std::fill(current.begin(), current.end(), 0.0);
    std::fill(series.begin(), series.end(), 0.0);
    current[start] = 1.0;
    double weight = 1.0;
    while (weight >= 1e-9) {
      std::fill(next.begin(), next.end(), 0.0);
      double mass = 0.0;
      for (uint32_t q = 0; q < n; ++q) {
        const double p = current[q];
        if (p == 0.0) continue;
        for (const auto& [e, w] : transition[q]) {
          next[e] += p * w;
        }
      }
      for (uint32_t e = 0; e < n; ++e) {
        series[e] += weight * next[e];
        mass += next[e];
      }
      if (mass == 0.0) break;
      current.swap(next);
      weight *= 1.0 - alpha;
    }
    double total = 0.0;
    for (double value : series) total += value;
    if (total > 0.0) {
      const double scale = 1.0 / (total * static_cast<double>(
                                              query.exercises.size()));
      for (uint32_t e = 0; e < n; ++e) mixture[e] += series[e] * scale;
    }
  }

  double total = 0.0;
  for (double value : mixture) total += value;
  if (total == 0.0) {
    throw Error(Errc::no_mass, "every query exercise is a dead end");
  }
  for (double& value : mixture) value /= total;
  return mixture;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(Errc::dimension_mismatch, "distribution sizes differ");
  }
  double sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

std::vector<EvalCase> load_cases(const std::filesystem::path& path) {
  std::vector<EvalCase> cases;
  for_each_record(path, [&](std::string_view line, size_t line_no) {
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw Error(Errc::malformed_line,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected `<material><TAB><progress_kc><TAB><q,...>`");
    }
    EvalCase eval_case;
    eval_case.material_id = std::string(fields[0]);
    eval_case.progress_kc = std::string(fields[1]);
    for (std::string_view id : split_commas(fields[2])) {
      if (!id.empty()) eval_case.query_ids.emplace_back(id);
    }
    if (eval_case.query_ids.empty()) {
      throw Error(Errc::malformed_line,
                  path.string() + ":" + std::to_string(line_no) +
                      ": empty query list");
    }
    cases.push_back(std::move(eval_case));
  });
  return cases;
}

namespace {

struct CaseOutcome {
  std::vector<std::pair<uint64_t, uint64_t>> hits_per_n;  // (hits, truth)
  std::vector<std::vector<std::string>> final_token_lists;
  uint64_t warning_count = 0;
};

CaseOutcome run_case(const Stores& stores, const EvalCase& eval_case,
                     size_t case_index, const EvalOptions& options,
                     const std::vector<uint32_t>& ns) {
  const TripartiteGraph& graph = *stores.graph;
  auto material = graph.material_index(eval_case.material_id);
  if (!material) {
    throw Error(Errc::unknown_node,
                "material '" + eval_case.material_id + "' not in graph");
  }

  QuerySet query = make_query_set(graph, eval_case.query_ids);

  // Ground truth: the material's exercises minus the query set.
  std::vector<uint32_t> truth;
  {
    auto linked = graph.material_exercises(*material);
    std::vector<uint32_t> sorted_query = query.exercises;
    std::sort(sorted_query.begin(), sorted_query.end());
    for (uint32_t e : linked) {
      if (!std::binary_search(sorted_query.begin(), sorted_query.end(), e)) {
        truth.push_back(e);
      }
    }
  }
  if (truth.empty()) {
    throw Error(Errc::empty_ground_truth,
                "material '" + eval_case.material_id +
                    "': no ground-truth exercise outside the query set");
  }

  // Case seeds come from the case index, not the request id, so the
  // report is invariant to case ordering by construction.
  WalkConfig walk = options.pipeline.walk;
  walk.seed = derive_seed(walk.seed, static_cast<uint64_t>(case_index));
  VisitCounter counter = run_walks(graph, query, walk, 1);
  CandidateList candidates =
      top_candidates(counter, walk.pool_size, query.exercises);

  CaseOutcome outcome;
  outcome.warning_count += counter.skipped_queries.size();

  if (options.pipeline.dp_enabled) {
    DedupeResult deduped =
        dedupe(candidates, *stores.embeddings, options.pipeline.diversity.tau);
    outcome.warning_count += deduped.missing_embeddings > 0 ? 1 : 0;
    candidates = std::move(deduped.list);
  }
  if (options.pipeline.sr_enabled) {
    RestrictResult restricted =
        restrict_candidates(candidates, graph, *stores.syllabus,
                            Progress{eval_case.progress_kc});
    candidates = std::move(restricted.list);
  }

  for (uint32_t n : ns) {
    std::span<const Candidate> top(candidates.entries.data(),
                                   std::min<size_t>(n, candidates.entries.size()));
    uint64_t hits = 0;
    for (const Candidate& candidate : top) {
      if (std::binary_search(truth.begin(), truth.end(), candidate.exercise)) {
        ++hits;
      }
    }
    outcome.hits_per_n.emplace_back(hits, truth.size());
  }

  const size_t largest =
      std::min<size_t>(ns.back(), candidates.entries.size());
  for (size_t i = 0; i < largest; ++i) {
    const std::string* text =
        stores.corpus ? stores.corpus->text_for(candidates.entries[i].exercise)
                      : nullptr;
    if (text) {
      outcome.final_token_lists.push_back(tokenize(*text));
    }
  }
  return outcome;
}

}  // namespace

EvalReport evaluate(const Stores& stores, std::span<const EvalCase> cases,
                    const EvalOptions& options) {
  if (cases.empty()) {
    throw Error(Errc::empty_case_list, "no evaluation cases");
  }
  if (options.ns.empty()) {
    throw Error(Errc::invalid_config, "N grid is empty");
  }
  std::vector<uint32_t> ns = options.ns;
  std::sort(ns.begin(), ns.end());
  if (ns.front() < 1) {
    throw Error(Errc::invalid_config, "N must be >= 1");
  }

  std::vector<CaseOutcome> outcomes(cases.size());
  std::vector<std::optional<Error>> failures(cases.size());

  auto run_range = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      try {
        outcomes[i] = run_case(stores, cases[i], i, options, ns);
      } catch (const Error& error) {
        failures[i] = error;
      }
    }
  };

  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.pipeline.threads,
                                      static_cast<unsigned>(cases.size())));
  if (threads == 1) {
    run_range(0, cases.size());
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (cases.size() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const size_t begin = w * chunk;
      const size_t end = std::min(cases.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& worker : pool) worker.join();
  }

  for (size_t i = 0; i < cases.size(); ++i) {
    if (failures[i]) {
      throw Error(failures[i]->code(),
                  "case " + std::to_string(i) + " (material '" +
                      cases[i].material_id + "'): " + failures[i]->what());
    }
  }

  EvalReport report;
  report.modules = modules_label(options.pipeline);
  report.case_count = cases.size();
  report.distinct2_pool_n = ns.back();
  for (size_t ni = 0; ni < ns.size(); ++ni) {
    std::vector<std::pair<uint64_t, uint64_t>> per_case;
    per_case.reserve(cases.size());
    for (const CaseOutcome& outcome : outcomes) {
      per_case.push_back(outcome.hits_per_n[ni]);
    }
    RecallAggregate aggregate = aggregate_recall(per_case);
    report.recalls.push_back({ns[ni], aggregate.macro, aggregate.micro});
  }

  std::vector<std::vector<std::string>> pooled;
  for (CaseOutcome& outcome : outcomes) {
    report.warning_count += outcome.warning_count;
    for (auto& tokens : outcome.final_token_lists) {
      pooled.push_back(std::move(tokens));
    }
  }
  try {
    report.distinct2 = distinct_2(pooled);
    report.distinct2_defined = true;
  } catch (const Error& error) {
    if (error.code() != Errc::no_bigrams) throw;
    report.distinct2_defined = false;
  }
  return report;
}

void print_report(std::ostream& out, const EvalReport& report) {
  char buffer[64];
  out << "modules\t" << report.modules << "\n";
  for (const EvalReport::PerN& row : report.recalls) {
    std::snprintf(buffer, sizeof(buffer), "%.4f", row.macro_recall);
    out << "macro_recall@" << row.n << "\t" << buffer << "\n";
    std::snprintf(buffer, sizeof(buffer), "%.4f", row.micro_recall);
    out << "micro_recall@" << row.n << "\t" << buffer << "\n";
  }
  if (report.distinct2_defined) {
    std::snprintf(buffer, sizeof(buffer), "%.4f", report.distinct2);
    out << "distinct2\t" << buffer << "\n";
  } else {
    out << "distinct2\tn/a\n";
  }
}

}  // namespace exrec
