#pragma once

#include <stdexcept>
#include <string>

namespace exrec {

enum class Errc {
  io_error,
  malformed_line,
  layer_violation,
  empty_graph,
  unknown_node,
  wrong_kind,
  invalid_alpha,
  invalid_config,
  empty_query,
  empty_token_list,
  zero_vector,
  dimension_mismatch,
  no_bigrams,
  duplicate_kc,
  empty_file,
  unknown_cutoff,
  empty_ground_truth,
  empty_case_list,
  graph_too_large,
  no_mass,
  infeasible_config,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace exrec
