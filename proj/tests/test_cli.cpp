#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "cli_support.hpp"
#include "doctest.h"
#include "test_support.hpp"

using clisup::run_cli;
using testsup::read_file;
using testsup::TempDir;
using testsup::write_file;

namespace {

// One shared small dataset for the whole binary's tests.
struct Dataset {
  TempDir dir;
  std::string flags;

  Dataset() {
    auto result = run_cli(
        "synth --kc-count 12 --exercise-count 100 --material-count 20 "
        "--exercises-per-material 4 --kcs-per-exercise 2 --query-size 2 "
        "--seed 5 --out " +
        dir.path().string());
    REQUIRE(result.exit_code == 0);
    flags = " --graph " + (dir.path() / "graph.tsv").string() +
            " --corpus " + (dir.path() / "corpus.tsv").string() +
            " --syllabus " + (dir.path() / "syllabus.txt").string();
  }

  std::string cases() const { return (dir.path() / "cases.tsv").string(); }
};

const Dataset& dataset() {
  static Dataset instance;
  return instance;
}

}  // namespace

TEST_CASE("cli: missing required flags exit with code 1") {
  auto result = run_cli("recommend --queries nowhere.tsv");
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("--graph") != std::string::npos);
}

TEST_CASE("cli: invalid alpha exits with code 1") {
  const Dataset& data = dataset();
  auto result = run_cli("recommend" + data.flags + " --queries " +
                        data.cases() + " --alpha 0");
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("InvalidAlpha") != std::string::npos);
}

TEST_CASE("cli: unknown module and bad N grid exit with code 1") {
  const Dataset& data = dataset();
  CHECK(run_cli("recommend" + data.flags + " --queries " + data.cases() +
                " --modules tg,xx")
            .exit_code == 1);
  CHECK(run_cli("evaluate" + data.flags + " --cases " + data.cases() +
                " --ns 0")
            .exit_code == 1);
}

TEST_CASE("cli: malformed requests exit with code 2") {
  const Dataset& data = dataset();
  TempDir dir;
  auto bad = write_file(dir.path(), "bad.tsv", "only-one-field\n");
  auto result = run_cli("recommend" + data.flags + " --queries " +
                        bad.string() + " --total-steps 1000");
  CHECK(result.exit_code == 2);

  auto ghost = write_file(dir.path(), "ghost.tsv", "m00\tkc00\tghost\n");
  auto unknown = run_cli("recommend" + data.flags + " --queries " +
                         ghost.string() + " --total-steps 1000");
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("UnknownNode") != std::string::npos);
}

TEST_CASE("cli: recommend emits one response line per request") {
  const Dataset& data = dataset();
  auto result = run_cli("recommend" + data.flags + " --queries " +
                        data.cases() +
                        " --total-steps 5000 --top-n 5 --seed 3");
  CHECK(result.exit_code == 0);
  size_t lines = 0;
  for (char c : result.out) lines += c == '\n';
  CHECK(lines == 20);
  CHECK(result.out.find("m00\t") == 0);
}

TEST_CASE("cli: recommend output is stable across runs and threads") {
  const Dataset& data = dataset();
  const std::string base = "recommend" + data.flags + " --queries " +
                           data.cases() +
                           " --total-steps 5000 --top-n 5 --seed 3 "
                           "--modules tg,dp,sr";
  auto first = run_cli(base);
  auto second = run_cli(base);
  auto threaded = run_cli(base + " --threads 4");
  CHECK(first.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(first.out == threaded.out);
  CHECK(!first.out.empty());
}

TEST_CASE("cli: evaluate reports are stable across runs and threads") {
  const Dataset& data = dataset();
  const std::string base = "evaluate" + data.flags + " --cases " +
                           data.cases() +
                           " --ns 5,10 --total-steps 5000 --seed 3 "
                           "--modules tg --modules tg,dp,sr";
  auto first = run_cli(base);
  auto second = run_cli(base);
  auto threaded = run_cli(base + " --threads 3");
  CHECK(first.exit_code == 0);
  CHECK(first.out == second.out);
  CHECK(first.out == threaded.out);
  CHECK(first.out.find("modules\ttg\n") == 0);
  CHECK(first.out.find("modules\ttg+dp+sr\n") != std::string::npos);
  CHECK(first.out.find("macro_recall@5\t") != std::string::npos);
  CHECK(first.out.find("distinct2\t") != std::string::npos);
}

TEST_CASE("cli: file-backed embeddings drive the same DP path") {
  const Dataset& data = dataset();
  const std::string base = "recommend" + data.flags + " --queries " +
                           data.cases() +
                           " --total-steps 5000 --top-n 5 --seed 3 "
                           "--modules tg,dp --tau 0.9";
  auto builtin = run_cli(base + " --embeddings builtin");
  auto from_file =
      run_cli(base + " --embeddings " +
              (data.dir.path() / "embeddings.tsv").string());
  CHECK(builtin.exit_code == 0);
  CHECK(from_file.exit_code == 0);
  // synth writes the builtin embeddings, so the two paths agree
  CHECK(builtin.out == from_file.out);
}

TEST_CASE("cli: builtin embeddings without a corpus exit with code 1") {
  const Dataset& data = dataset();
  auto result = run_cli("recommend --graph " +
                        (data.dir.path() / "graph.tsv").string() +
                        " --queries " + data.cases() + " --modules tg,dp");
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("corpus") != std::string::npos);
}

TEST_CASE("cli: synth is deterministic directory-for-directory") {
  TempDir a, b;
  const std::string flags =
      "synth --kc-count 12 --exercise-count 100 --material-count 20 "
      "--exercises-per-material 4 --kcs-per-exercise 2 --query-size 2 "
      "--seed 7 --out ";
  CHECK(run_cli(flags + a.path().string()).exit_code == 0);
  CHECK(run_cli(flags + b.path().string()).exit_code == 0);
  for (const char* name : {"graph.tsv", "corpus.tsv", "syllabus.txt",
                           "cases.tsv", "embeddings.tsv"}) {
    CHECK(read_file(a.path() / name) == read_file(b.path() / name));
  }
}

TEST_CASE("cli: synth rejects infeasible configs with exit code 1") {
  TempDir dir;
  auto result = run_cli(
      "synth --exercises-per-material 10 --exercise-count 5 --out " +
      dir.path().string());
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("InfeasibleConfig") != std::string::npos);
}

TEST_CASE("cli: serve answers requests line by line") {
  const Dataset& data = dataset();
  const std::string cases_text = read_file(data.cases());

  // First request from the cases file, rewritten into serve form.
  const size_t tab1 = cases_text.find('\t');
  const size_t tab2 = cases_text.find('\t', tab1 + 1);
  const size_t eol = cases_text.find('\n');
  const std::string material = cases_text.substr(0, tab1);
  const std::string progress = cases_text.substr(tab1 + 1, tab2 - tab1 - 1);
  const std::string queries = cases_text.substr(tab2 + 1, eol - tab2 - 1);
  const std::string request =
      material + "\t" + progress + "\t" + queries + "\t5\n";

  const std::string serve_cmd = "serve" + dataset().flags +
                                " --total-steps 5000 --seed 3 "
                                "--modules tg,dp,sr";

  auto empty = run_cli(serve_cmd);
  CHECK(empty.exit_code == 0);
  CHECK(empty.out.empty());

  auto mixed = run_cli(serve_cmd,
                       "garbage line\n" + request + "nope\tkc00\tex0000\t0\n");
  CHECK(mixed.exit_code == 0);
  CHECK(mixed.out.find("ERR\tgarbage line\t") == 0);
  CHECK(mixed.out.find("\nERR\tnope\t") != std::string::npos);
  CHECK(mixed.out.find(material + "\t") != std::string::npos);

  // batch/serve equivalence for the same request and seed
  TempDir dir;
  auto one_case = write_file(dir.path(), "one.tsv",
                             material + "\t" + progress + "\t" + queries + "\n");
  auto batch = run_cli("recommend" + dataset().flags + " --queries " +
                       one_case.string() +
                       " --total-steps 5000 --seed 3 --top-n 5 "
                       "--modules tg,dp,sr");
  auto served = run_cli(serve_cmd, request);
  CHECK(batch.exit_code == 0);
  CHECK(served.exit_code == 0);
  CHECK(batch.out == served.out);

  auto twice = run_cli(serve_cmd, request + request);
  const size_t newline = twice.out.find('\n');
  CHECK(twice.out.substr(0, newline + 1) == twice.out.substr(newline + 1));
}
