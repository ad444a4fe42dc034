#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "exrec/corpus.hpp"
#include "exrec/embedding.hpp"
#include "exrec/errors.hpp"
#include "exrec/eval.hpp"
#include "exrec/graph.hpp"
#include "exrec/lineio.hpp"
#include "exrec/pipeline.hpp"
#include "exrec/scope.hpp"
#include "exrec/synth.hpp"
#include "exrec/walker.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;   // configuration / load failures
constexpr int kExitRequest = 2;  // malformed batch input

struct StoreFlags {
  std::string graph;
  std::string corpus;
  std::string embeddings = "builtin";
  std::string syllabus;
};

struct WalkFlags {
  double alpha = 0.04;
  uint64_t total_steps = 100000;
  uint32_t pool_size = 0;  // 0 = 4 * top_n
  uint64_t seed = 0;
  double tau = 0.9;
  std::string modules = "tg";
  unsigned threads = 1;
};

void add_store_flags(CLI::App* cmd, StoreFlags& flags, bool corpus_required) {
  cmd->add_option("--graph", flags.graph, "graph TSV file")->required();
  auto* corpus = cmd->add_option("--corpus", flags.corpus,
                                 "exercise text TSV (id<TAB>text)");
  if (corpus_required) corpus->required();
  cmd->add_option("--embeddings", flags.embeddings,
                  "embedding TSV path, or 'builtin'");
  cmd->add_option("--syllabus", flags.syllabus, "syllabus KC order file");
}

void add_walk_flags(CLI::App* cmd, WalkFlags& flags) {
  cmd->add_option("--alpha", flags.alpha,
                  "per-step termination probability in (0,1]");
  cmd->add_option("--total-steps", flags.total_steps, "walk step budget");
  cmd->add_option("--pool-size", flags.pool_size,
                  "candidate pool size (default 4*top_n)");
  cmd->add_option("--seed", flags.seed, "master PRNG seed");
  cmd->add_option("--tau", flags.tau, "near-duplicate similarity threshold");
  cmd->add_option("--threads", flags.threads, "worker threads");
}

struct ModuleToggles {
  bool dp = false;
  bool sr = false;
};

ModuleToggles parse_modules(const std::string& spec) {
  ModuleToggles toggles;
  bool saw_tg = false;
  for (std::string_view part : exrec::split_commas(spec)) {
    if (part == "tg") {
      saw_tg = true;
    } else if (part == "dp") {
      toggles.dp = true;
    } else if (part == "sr") {
      toggles.sr = true;
    } else {
      throw exrec::Error(exrec::Errc::invalid_config,
                         "unknown module '" + std::string(part) +
                             "' (expected tg[,dp][,sr])");
    }
  }
  if (!saw_tg) {
    throw exrec::Error(exrec::Errc::invalid_config,
                       "module list must include tg");
  }
  return toggles;
}

// Owns the loaded artifacts; Stores only points into this.
struct LoadedStores {
  exrec::TripartiteGraph graph;
  exrec::Corpus corpus;
  std::optional<exrec::EmbeddingTable> embeddings;
  exrec::SyllabusOrder syllabus;
  exrec::Stores view;
};

LoadedStores load_stores(const StoreFlags& flags, const ModuleToggles& toggles) {
  LoadedStores stores;
  exrec::GraphLoadResult loaded = exrec::load_graph(flags.graph);
  if (loaded.duplicate_edges > 0) {
    std::cerr << "warning: collapsed " << loaded.duplicate_edges
              << " duplicate edge line(s)\n";
  }
  stores.graph = std::move(loaded.graph);
  stores.view.graph = &stores.graph;

  if (!flags.corpus.empty()) {
    stores.corpus = exrec::load_corpus(flags.corpus, stores.graph);
    if (stores.corpus.unknown_ids() > 0) {
      std::cerr << "warning: corpus mentions " << stores.corpus.unknown_ids()
                << " unknown exercise id(s)\n";
    }
  }
  stores.view.corpus = &stores.corpus;

  if (toggles.dp) {
    if (flags.embeddings == "builtin") {
      if (flags.corpus.empty()) {
        throw exrec::Error(exrec::Errc::invalid_config,
                           "builtin embeddings require --corpus");
      }
      stores.embeddings = exrec::EmbeddingTable::builtin(stores.corpus);
    } else {
      stores.embeddings =
          exrec::EmbeddingTable::load_file(flags.embeddings, stores.graph);
      if (stores.embeddings->unknown_ids() > 0) {
        std::cerr << "warning: embedding file mentions "
                  << stores.embeddings->unknown_ids()
                  << " unknown exercise id(s)\n";
      }
    }
    stores.view.embeddings = &*stores.embeddings;
  }

  if (toggles.sr) {
    if (flags.syllabus.empty()) {
      throw exrec::Error(exrec::Errc::invalid_config,
                         "scope restriction requires --syllabus");
    }
    stores.syllabus = exrec::load_syllabus(flags.syllabus);
    stores.view.syllabus = &stores.syllabus;
  }
  return stores;
}

exrec::PipelineConfig make_pipeline_config(const WalkFlags& walk,
                                           const ModuleToggles& toggles,
                                           uint32_t top_n) {
  exrec::PipelineConfig config;
  config.walk.alpha = walk.alpha;
  config.walk.total_steps = walk.total_steps;
  config.walk.seed = walk.seed;
  config.walk.pool_size =
      walk.pool_size > 0 ? walk.pool_size : 4 * std::max(1u, top_n);
  config.dp_enabled = toggles.dp;
  config.diversity.tau = walk.tau;
  config.sr_enabled = toggles.sr;
  config.top_n = top_n;
  config.threads = walk.threads;
  return config;
}

int cmd_recommend(const StoreFlags& store_flags, const WalkFlags& walk_flags,
                  const std::string& queries_path, uint32_t top_n) {
  ModuleToggles toggles = parse_modules(walk_flags.modules);
  LoadedStores stores = load_stores(store_flags, toggles);
  exrec::PipelineConfig config =
      make_pipeline_config(walk_flags, toggles, top_n);
  exrec::validate(config);

  std::vector<exrec::EvalCase> requests;
  try {
    requests = exrec::load_cases(queries_path);
  } catch (const exrec::Error& error) {
    if (error.code() == exrec::Errc::io_error) throw;
    std::cerr << error.what() << "\n";
    return kExitRequest;
  }
  for (const exrec::EvalCase& request : requests) {
    exrec::Request pipeline_request;
    pipeline_request.id = request.material_id;
    pipeline_request.query_ids = request.query_ids;
    pipeline_request.progress_kc = request.progress_kc;
    try {
      exrec::RecommendationResponse response =
          exrec::run_pipeline(pipeline_request, stores.view, config);
      for (const std::string& warning : response.warnings) {
        std::cerr << "warning: request " << response.request_id << ": "
                  << warning << "\n";
      }
      std::cout << exrec::format_response(response) << "\n";
    } catch (const exrec::Error& error) {
      std::cerr << "request " << pipeline_request.id << ": " << error.what()
                << "\n";
      return kExitRequest;
    }
  }
  return kExitOk;
}

int cmd_evaluate(const StoreFlags& store_flags, const WalkFlags& walk_flags,
                 const std::string& cases_path, const std::string& ns_spec,
                 const std::vector<std::string>& module_specs) {
  std::vector<uint32_t> ns;
  for (std::string_view part : exrec::split_commas(ns_spec)) {
    uint32_t n = 0;
    try {
      n = static_cast<uint32_t>(std::stoul(std::string(part)));
    } catch (const std::exception&) {
      throw exrec::Error(exrec::Errc::invalid_config,
                         "bad N '" + std::string(part) + "'");
    }
    if (n < 1) {
      throw exrec::Error(exrec::Errc::invalid_config, "N must be >= 1");
    }
    ns.push_back(n);
  }
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.empty()) {
    throw exrec::Error(exrec::Errc::invalid_config, "empty N grid");
  }

  std::vector<std::string> specs = module_specs;
  if (specs.empty()) specs.push_back("tg");

  // Load the union of what any ablation needs.
  ModuleToggles any;
  std::vector<ModuleToggles> toggle_list;
  for (const std::string& spec : specs) {
    ModuleToggles toggles = parse_modules(spec);
    any.dp = any.dp || toggles.dp;
    any.sr = any.sr || toggles.sr;
    toggle_list.push_back(toggles);
  }
  LoadedStores stores = load_stores(store_flags, any);
  std::vector<exrec::EvalCase> cases = exrec::load_cases(cases_path);

  for (const ModuleToggles& toggles : toggle_list) {
    exrec::EvalOptions options;
    options.ns = ns;
    options.pipeline = make_pipeline_config(walk_flags, toggles, ns.back());
    exrec::EvalReport report = exrec::evaluate(stores.view, cases, options);
    exrec::print_report(std::cout, report);
    std::cerr << "modules " << report.modules << ": " << report.case_count
              << " case(s), " << report.warning_count
              << " warning(s); distinct-2 pools bigrams over final sets at N="
              << report.distinct2_pool_n << "\n";
  }
  return kExitOk;
}

int cmd_serve(const StoreFlags& store_flags, const WalkFlags& walk_flags) {
  ModuleToggles toggles = parse_modules(walk_flags.modules);
  LoadedStores stores = load_stores(store_flags, toggles);

  std::string line;
  while (std::getline(std::cin, line)) {
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty()) continue;
    auto fields = exrec::split_tabs(view);
    std::string request_id =
        fields.empty() || fields[0].empty() ? "-" : std::string(fields[0]);
    try {
      if (fields.size() != 4) {
        throw exrec::Error(
            exrec::Errc::malformed_line,
            "expected <id><TAB><progress_kc><TAB><q,...><TAB><top_n>");
      }
      uint32_t top_n = 0;
      try {
        top_n = static_cast<uint32_t>(std::stoul(std::string(fields[3])));
      } catch (const std::exception&) {
        throw exrec::Error(exrec::Errc::malformed_line,
                           "bad top_n '" + std::string(fields[3]) + "'");
      }
      if (top_n < 1) {
        throw exrec::Error(exrec::Errc::malformed_line, "top_n must be >= 1");
      }
      exrec::Request request;
      request.id = request_id;
      request.progress_kc = std::string(fields[1]);
      for (std::string_view id : exrec::split_commas(fields[2])) {
        if (!id.empty()) request.query_ids.emplace_back(id);
      }
      request.top_n = top_n;
      exrec::PipelineConfig config =
          make_pipeline_config(walk_flags, toggles, top_n);
      exrec::RecommendationResponse response =
          exrec::run_pipeline(request, stores.view, config);
      std::cout << exrec::format_response(response) << "\n" << std::flush;
    } catch (const exrec::Error& error) {
      std::cout << "ERR\t" << request_id << "\t" << error.what() << "\n"
                << std::flush;
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exercise recommendation over a KC-exercise-material graph"};
  app.require_subcommand(1);

  StoreFlags store_flags;
  WalkFlags walk_flags;

  // recommend
  auto* recommend = app.add_subcommand(
      "recommend", "batch recommendations for a request file");
  std::string queries_path;
  uint32_t top_n = 25;
  add_store_flags(recommend, store_flags, false);
  add_walk_flags(recommend, walk_flags);
  recommend->add_option("--queries", queries_path,
                        "request file (<id><TAB><progress_kc><TAB><q,...>)")
      ->required();
  recommend->add_option("--top-n", top_n, "recommendations per request");
  recommend->add_option("--modules", walk_flags.modules,
                        "pipeline modules: tg[,dp][,sr]");

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "recall / distinct-2 evaluation over a cases file");
  std::string cases_path;
  std::string ns_spec = "10,25,100";
  std::vector<std::string> module_specs;
  add_store_flags(evaluate, store_flags, true);
  add_walk_flags(evaluate, walk_flags);
  evaluate->add_option("--cases", cases_path, "cases file")->required();
  evaluate->add_option("--ns", ns_spec, "comma-separated N grid");
  evaluate->add_option("--modules", module_specs,
                       "ablation to run (repeatable)");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  exrec::SynthConfig synth_config;
  std::string out_dir;
  bool skip_embeddings = false;
  synth->add_option("--kc-count", synth_config.kc_count, "number of KCs");
  synth->add_option("--exercise-count", synth_config.exercise_count,
                    "number of exercises");
  synth->add_option("--material-count", synth_config.material_count,
                    "number of class materials");
  synth->add_option("--exercises-per-material",
                    synth_config.exercises_per_material,
                    "bundle size per material");
  synth->add_option("--kcs-per-exercise", synth_config.kcs_per_exercise,
                    "KC links per exercise");
  synth->add_option("--query-size", synth_config.query_size,
                    "query exercises per case");
  synth->add_option("--near-duplicate-fraction",
                    synth_config.near_duplicate_fraction,
                    "fraction of exercises that are near-duplicate twins");
  synth->add_option("--out-of-scope-distractor-fraction",
                    synth_config.out_of_scope_distractor_fraction,
                    "fraction of exercises that are out-of-scope distractors");
  synth->add_option("--seed", synth_config.seed, "generator seed");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_flag("--skip-embeddings", skip_embeddings,
                  "do not write embeddings.tsv");

  // serve
  auto* serve = app.add_subcommand(
      "serve", "read requests from stdin, one response line each");
  add_store_flags(serve, store_flags, false);
  add_walk_flags(serve, walk_flags);
  serve->add_option("--modules", walk_flags.modules,
                    "pipeline modules: tg[,dp][,sr]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    if (error.get_exit_code() == 0) return app.exit(error);  // --help
    std::cerr << error.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (recommend->parsed()) {
      return cmd_recommend(store_flags, walk_flags, queries_path, top_n);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(store_flags, walk_flags, cases_path, ns_spec,
                          module_specs);
    }
    if (synth->parsed()) {
      exrec::synth_dataset(synth_config, out_dir, !skip_embeddings);
      return kExitOk;
    }
    if (serve->parsed()) {
      return cmd_serve(store_flags, walk_flags);
    }
  } catch (const exrec::Error& error) {
    std::cerr << error.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
