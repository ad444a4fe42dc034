#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "exrec/graph.hpp"
#include "exrec/walker.hpp"

namespace exrec {

// Total order over KCs: rank 0 is taught first.
struct SyllabusOrder {
  std::vector<std::string> kc_ids;  // rank -> id
  std::unordered_map<std::string, uint32_t> ranks;
};

// One KC id per line, rank = line position; `#` comments and blanks
// skipped. Throws DuplicateKc / EmptyFile.
SyllabusOrder load_syllabus(const std::filesystem::path& path);

struct Progress {
  std::string cutoff_kc;  // last syllabus KC covered so far
};

struct RestrictResult {
  CandidateList list;
  uint32_t dropped_no_kc = 0;
  uint32_t dropped_out_of_scope = 0;
  uint32_t dropped_unknown_kc = 0;
};

// Keeps a candidate iff it has at least one KC and every attached KC has
// syllabus rank <= rank(cutoff). KCs missing from the syllabus fail
// closed. Throws UnknownCutoff.
RestrictResult restrict_candidates(const CandidateList& candidates,
                                   const TripartiteGraph& graph,
                                   const SyllabusOrder& syllabus,
                                   const Progress& progress);

}  // namespace exrec
