#pragma once

// Helpers for driving the command-line binary from tests.

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "test_support.hpp"

namespace clisup {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs `exrec <args>`, optionally feeding `stdin_text`. Quoting is the
// caller's job; arguments here never contain shell metacharacters.
inline CliResult run_cli(const std::string& args,
                         const std::string& stdin_text = {}) {
  testsup::TempDir scratch;
  const auto out_path = scratch.path() / "out";
  const auto err_path = scratch.path() / "err";
  std::string command = std::string(EXREC_BIN) + " " + args;
  if (!stdin_text.empty()) {
    testsup::write_file(scratch.path(), "in", stdin_text);
    command += " < " + (scratch.path() / "in").string();
  } else {
    command += " < /dev/null";
  }
  command += " > " + out_path.string() + " 2> " + err_path.string();
  const int status = std::system(command.c_str());

  CliResult result;
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  result.out = testsup::read_file(out_path);
  result.err = testsup::read_file(err_path);
  return result;
}

}  // namespace clisup
