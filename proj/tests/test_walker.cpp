#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "doctest.h"
#include "exrec/errors.hpp"
#include "exrec/eval.hpp"
#include "exrec/walker.hpp"
#include "test_support.hpp"

using exrec::Errc;
using exrec::make_query_set;
using exrec::random_step;
using exrec::Rng;
using exrec::run_walks;
using exrec::sample_walk_length;
using exrec::top_candidates;
using exrec::VisitCounter;
using exrec::WalkConfig;
using testsup::TempDir;
using testsup::thrown_code;
using testsup::write_file;

TEST_CASE("sample_walk_length: alpha = 1 always returns 1") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    CHECK(sample_walk_length(1.0, rng) == 1);
  }
}

TEST_CASE("sample_walk_length: mean matches 1/alpha at alpha = 0.04") {
  Rng rng(41);
  const int draws = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    sum += static_cast<double>(sample_walk_length(0.04, rng));
  }
  const double mean = sum / draws;
  CHECK(mean == doctest::Approx(25.0).epsilon(0.01));
  CHECK(std::abs(mean - 25.0) < 0.25);
}

TEST_CASE("sample_walk_length: P(L = 1) equals alpha at alpha = 0.5") {
  Rng rng(42);
  const int draws = 1'000'000;
  int ones = 0;
  for (int i = 0; i < draws; ++i) {
    if (sample_walk_length(0.5, rng) == 1) ++ones;
  }
  CHECK(std::abs(static_cast<double>(ones) / draws - 0.5) < 0.005);
}

TEST_CASE("sample_walk_length rejects alpha outside (0, 1]") {
  Rng rng(1);
  CHECK(thrown_code([&] { sample_walk_length(0.0, rng); }) ==
        Errc::invalid_alpha);
  CHECK(thrown_code([&] { sample_walk_length(-0.2, rng); }) ==
        Errc::invalid_alpha);
  CHECK(thrown_code([&] { sample_walk_length(1.5, rng); }) ==
        Errc::invalid_alpha);
}

// One-step law from q1 in g0, by exact enumeration of the two-stage
// sampling: pivots {k1, m1} at 1/2 each; k1 fans out to {q1,q2,q3} at 1/3,
// m1 to {q1,q2} at 1/2. P(q1) = P(q2) = 1/6 + 1/4 = 5/12, P(q3) = 1/6.
TEST_CASE("random_step matches the exact one-step law on g0") {
  auto graph = testsup::load_fixture("g0.tsv");
  const uint32_t q1 = *graph.exercise_index("q1");
  Rng rng(20240811);
  const int draws = 1'000'000;
  std::vector<int> hits(graph.exercise_count(), 0);
  for (int i = 0; i < draws; ++i) {
    auto next = random_step(graph, q1, rng);
    REQUIRE(next.has_value());
    ++hits[*next];
  }
  const double p_q1 = static_cast<double>(hits[*graph.exercise_index("q1")]) / draws;
  const double p_q2 = static_cast<double>(hits[*graph.exercise_index("q2")]) / draws;
  const double p_q3 = static_cast<double>(hits[*graph.exercise_index("q3")]) / draws;
  CHECK(std::abs(p_q1 - 5.0 / 12.0) < 0.005);
  CHECK(std::abs(p_q2 - 5.0 / 12.0) < 0.005);
  CHECK(std::abs(p_q3 - 1.0 / 6.0) < 0.005);
}

TEST_CASE("random_step returns DeadEnd only on isolated exercises") {
  TempDir dir;
  auto graph =
      exrec::load_graph(
          write_file(dir.path(), "g.tsv", "E1\tk1\tq1\nNODE\tEX\tq9\n"))
          .graph;
  Rng rng(5);
  CHECK_FALSE(random_step(graph, *graph.exercise_index("q9"), rng));
  CHECK(random_step(graph, *graph.exercise_index("q1"), rng));
}

TEST_CASE("random_step self-transitions when the pivot has one exercise") {
  TempDir dir;
  auto graph = exrec::load_graph(
                   write_file(dir.path(), "g.tsv", "E1\tk5\tq5\n"))
                   .graph;
  const uint32_t q5 = *graph.exercise_index("q5");
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    auto next = random_step(graph, q5, rng);
    REQUIRE(next.has_value());
    CHECK(*next == q5);
  }
}

TEST_CASE("run_walks is deterministic, budget-exact and conservative") {
  auto graph = testsup::load_fixture("chain.tsv");
  auto query = make_query_set(
      graph, std::vector<std::string>{"e01", "e07"});
  WalkConfig config;
  config.alpha = 0.1;
  config.total_steps = 10'001;  // odd, exercises the remainder split
  config.seed = 42;

  VisitCounter first = run_walks(graph, query, config);
  VisitCounter second = run_walks(graph, query, config);
  CHECK(first == second);

  CHECK(first.executed_steps == config.total_steps);
  CHECK(std::accumulate(first.counts.begin(), first.counts.end(),
                        uint64_t{0}) == first.executed_steps);
  CHECK(first.skipped_queries.empty());
}

TEST_CASE("run_walks is schedule-independent across thread counts") {
  auto graph = testsup::load_fixture("chain.tsv");
  auto query = make_query_set(
      graph, std::vector<std::string>{"e01", "e05", "e09", "e12"});
  WalkConfig config;
  config.total_steps = 40'000;
  config.seed = 7;
  VisitCounter one = run_walks(graph, query, config, 1);
  VisitCounter two = run_walks(graph, query, config, 2);
  VisitCounter four = run_walks(graph, query, config, 4);
  CHECK(one == two);
  CHECK(one == four);
}

TEST_CASE("run_walks skips dead-end query starts with a warning") {
  TempDir dir;
  auto graph = exrec::load_graph(write_file(dir.path(), "g.tsv",
                                            "E1\tk1\tq1\nNODE\tEX\tq9\n"))
                   .graph;
  WalkConfig config;
  config.total_steps = 1000;

  auto only_dead = make_query_set(graph, std::vector<std::string>{"q9"});
  VisitCounter counter = run_walks(graph, only_dead, config);
  CHECK(counter.executed_steps == 0);
  CHECK(std::accumulate(counter.counts.begin(), counter.counts.end(),
                        uint64_t{0}) == 0);
  CHECK(counter.skipped_queries ==
        std::vector<uint32_t>{*graph.exercise_index("q9")});

  auto mixed = make_query_set(graph, std::vector<std::string>{"q1", "q9"});
  VisitCounter half = run_walks(graph, mixed, config);
  CHECK(half.executed_steps == 500);  // q9's share goes unused
  CHECK(half.skipped_queries.size() == 1);
}

TEST_CASE("run_walks validates inputs") {
  auto graph = testsup::load_fixture("g0.tsv");
  WalkConfig config;
  CHECK(thrown_code([&] {
          run_walks(graph, exrec::QuerySet{}, config);
        }) == Errc::empty_query);
  CHECK(thrown_code([&] {
          make_query_set(graph, std::vector<std::string>{"ghost"});
        }) == Errc::unknown_node);
  config.alpha = 0.0;
  auto query = make_query_set(graph, std::vector<std::string>{"q1"});
  CHECK(thrown_code([&] { run_walks(graph, query, config); }) ==
        Errc::invalid_alpha);
}

TEST_CASE("top_candidates filters, sorts and truncates") {
  VisitCounter counter;
  counter.counts = {20, 50, 30};  // q1, q2, q3 by index
  counter.executed_steps = 100;

  std::vector<uint32_t> exclude_q1{0};
  auto list = top_candidates(counter, 2, exclude_q1);
  REQUIRE(list.entries.size() == 2);
  CHECK(list.entries[0] == exrec::Candidate{1, 50});
  CHECK(list.entries[1] == exrec::Candidate{2, 30});
  CHECK(list.stage == exrec::Stage::Generated);

  VisitCounter tie;
  tie.counts = {10, 10};
  auto tied = top_candidates(tie, 2, {});
  REQUIRE(tied.entries.size() == 2);
  CHECK(tied.entries[0].exercise == 0);  // id ascending on equal score
  CHECK(tied.entries[1].exercise == 1);

  VisitCounter empty;
  CHECK(top_candidates(empty, 5, {}).entries.empty());
}

TEST_CASE("top_candidates scores are non-increasing on random counters") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    VisitCounter counter;
    counter.counts.resize(1 + rng.bounded(30));
    for (auto& count : counter.counts) count = rng.bounded(8);
    auto list = top_candidates(counter, 1 + static_cast<uint32_t>(rng.bounded(10)), {});
    for (size_t i = 1; i < list.entries.size(); ++i) {
      CHECK(list.entries[i - 1].score >= list.entries[i].score);
      if (list.entries[i - 1].score == list.entries[i].score) {
        CHECK(list.entries[i - 1].exercise < list.entries[i].exercise);
      }
    }
    for (const auto& entry : list.entries) CHECK(entry.score > 0);
  }
}

TEST_CASE("run_walks counts only exercises reachable from the query") {
  exrec::Rng rng(313);
  TempDir dir;
  for (int trial = 0; trial < 20; ++trial) {
    auto path = write_file(dir.path(), "g.tsv", testsup::random_graph_tsv(rng));
    auto graph = exrec::load_graph(path).graph;
    const uint32_t start = static_cast<uint32_t>(
        rng.bounded(graph.exercise_count()));
    exrec::QuerySet query{{start}};
    WalkConfig config;
    config.total_steps = 2000;
    config.seed = trial;
    VisitCounter counter = run_walks(graph, query, config);

    // Reachable set by BFS over exercise-pivot-exercise hops.
    std::vector<bool> reachable(graph.exercise_count(), false);
    std::queue<uint32_t> frontier;
    reachable[start] = true;
    frontier.push(start);
    while (!frontier.empty()) {
      uint32_t e = frontier.front();
      frontier.pop();
      auto visit = [&](uint32_t other) {
        if (!reachable[other]) {
          reachable[other] = true;
          frontier.push(other);
        }
      };
      for (uint32_t k : graph.kcs_of(e)) {
        for (uint32_t other : graph.kc_exercises(k)) visit(other);
      }
      for (uint32_t m : graph.materials_of(e)) {
        for (uint32_t other : graph.material_exercises(m)) visit(other);
      }
    }
    for (uint32_t e = 0; e < graph.exercise_count(); ++e) {
      if (counter.counts[e] > 0) CHECK(reachable[e]);
    }
  }
}

// Two independent routes to the same distribution: the budgeted walker
// versus the discounted power-series oracle.
TEST_CASE("run_walks visit frequencies match the oracle on g0") {
  auto graph = testsup::load_fixture("g0.tsv");
  auto query = make_query_set(graph, std::vector<std::string>{"q1"});
  WalkConfig config;
  config.alpha = 0.04;
  config.total_steps = 1'000'000;
  config.seed = 1;
  VisitCounter counter = run_walks(graph, query, config);

  std::vector<double> empirical(graph.exercise_count(), 0.0);
  for (size_t e = 0; e < empirical.size(); ++e) {
    empirical[e] = static_cast<double>(counter.counts[e]) /
                   static_cast<double>(counter.executed_steps);
  }
  std::vector<double> oracle =
      exrec::stationary_oracle(graph, query, config.alpha);
  CHECK(exrec::total_variation(empirical, oracle) <= 0.02);
}
