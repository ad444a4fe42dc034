#include "exrec/errors.hpp"

namespace exrec {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::io_error:
      return "IoError";
    case Errc::malformed_line:
      return "MalformedLine";
    case Errc::layer_violation:
      return "LayerViolation";
    case Errc::empty_graph:
      return "EmptyGraph";
    case Errc::unknown_node:
      return "UnknownNode";
    case Errc::wrong_kind:
      return "WrongKind";
    case Errc::invalid_alpha:
      return "InvalidAlpha";
    case Errc::invalid_config:
      return "InvalidConfig";
    case Errc::empty_query:
      return "EmptyQuery";
    case Errc::empty_token_list:
      return "EmptyTokenList";
    case Errc::zero_vector:
      return "ZeroVector";
    case Errc::dimension_mismatch:
      return "DimensionMismatch";
    case Errc::no_bigrams:
      return "NoBigrams";
    case Errc::duplicate_kc:
      return "DuplicateKc";
    case Errc::empty_file:
      return "EmptyFile";
    case Errc::unknown_cutoff:
      return "UnknownCutoff";
    case Errc::empty_ground_truth:
      return "EmptyGroundTruth";
    case Errc::empty_case_list:
      return "EmptyCaseList";
    case Errc::graph_too_large:
      return "GraphTooLarge";
    case Errc::no_mass:
      return "NoMass";
    case Errc::infeasible_config:
      return "InfeasibleConfig";
  }
  return "Error";
}

}  // namespace exrec
