#pragma once

#include <cstdint>
#include <filesystem>

namespace exrec {

// Desk-scale dataset generator. Materials march through the syllabus in
// disjoint KC windows; each bundles exercises whose KCs stay inside its
// window, so a case's cutoff (its window end) never excludes its own
// ground truth. Near-duplicate twins copy an exercise's token stream with
// one token changed. Out-of-scope distractors attach to an early
// material's window KCs plus one late-syllabus KC, making them reachable
// from early queries but always beyond those cases' cutoffs.
struct SynthConfig {
  uint32_t kc_count = 60;
  uint32_t exercise_count = 2400;
  uint32_t material_count = 200;
  uint32_t exercises_per_material = 8;
  uint32_t kcs_per_exercise = 2;
  uint32_t query_size = 3;
  double near_duplicate_fraction = 0.1;
  double out_of_scope_distractor_fraction = 0.1;
  uint64_t seed = 1;
};

// Throws InfeasibleConfig with the violated constraint named.
void validate(const SynthConfig& config);

// Writes graph.tsv, corpus.tsv, syllabus.txt, cases.tsv and (unless
// disabled) embeddings.tsv into `out_dir`, creating it if needed. Output
// bytes are a pure function of the config.
void synth_dataset(const SynthConfig& config,
                   const std::filesystem::path& out_dir,
                   bool write_embeddings = true);

}  // namespace exrec
