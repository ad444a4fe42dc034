#include "exrec/scope.hpp"

#include "exrec/errors.hpp"
#include "exrec/lineio.hpp"

namespace exrec {

SyllabusOrder load_syllabus(const std::filesystem::path& path) {
  SyllabusOrder syllabus;
  for_each_record(path, [&](std::string_view line, size_t line_no) {
    std::string id(line);
    auto [it, inserted] = syllabus.ranks.emplace(
        id, static_cast<uint32_t>(syllabus.kc_ids.size()));
    if (!inserted) {
      throw Error(Errc::duplicate_kc,
                  path.string() + ":" + std::to_string(line_no) +
                      ": KC '" + id + "' listed twice");
    }
    syllabus.kc_ids.push_back(std::move(id));
  });
  if (syllabus.kc_ids.empty()) {
    throw Error(Errc::empty_file, path.string() + ": no KC lines");
  }
  return syllabus;
}

RestrictResult restrict_candidates(const CandidateList& candidates,
                                   const TripartiteGraph& graph,
                                   const SyllabusOrder& syllabus,
                                   const Progress& progress) {
  auto cutoff_it = syllabus.ranks.find(progress.cutoff_kc);
  if (cutoff_it == syllabus.ranks.end()) {
    throw Error(Errc::unknown_cutoff,
                "progress KC '" + progress.cutoff_kc + "' not in syllabus");
  }
  const uint32_t cutoff_rank = cutoff_it->second;

  RestrictResult result;
  result.list.stage = Stage::AfterSr;
  for (const Candidate& candidate : candidates.entries) {
    std::span<const uint32_t> kcs = graph.kcs_of(candidate.exercise);
    if (kcs.empty()) {
      ++result.dropped_no_kc;
      continue;
    }
    bool unknown = false;
    bool beyond = false;
    for (uint32_t kc : kcs) {
      auto rank_it = syllabus.ranks.find(graph.kc_id(kc));
      if (rank_it == syllabus.ranks.end()) {
        unknown = true;
        break;
      }
      if (rank_it->second > cutoff_rank) beyond = true;
    }
    if (unknown) {
      ++result.dropped_unknown_kc;
    } else if (beyond) {
      ++result.dropped_out_of_scope;
    } else {
      result.list.entries.push_back(candidate);
    }
  }
  return result;
}

}  // namespace exrec
