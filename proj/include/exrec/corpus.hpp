#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "exrec/graph.hpp"

namespace exrec {

// Exercise texts, keyed by graph exercise index. Lines mentioning ids the
// graph does not know are counted and skipped.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(uint32_t exercise_count) : texts_(exercise_count) {}

  void set_text(uint32_t exercise, std::string text) {
    texts_[exercise] = std::move(text);
  }

  const std::string* text_for(uint32_t exercise) const {
    if (exercise >= texts_.size() || !texts_[exercise]) return nullptr;
    return &*texts_[exercise];
  }

  uint32_t unknown_ids() const { return unknown_ids_; }
  void count_unknown() { ++unknown_ids_; }

 private:
  std::vector<std::optional<std::string>> texts_;
  uint32_t unknown_ids_ = 0;
};

// Loads `<exercise_id><TAB><text>` records; `#` comments and blank lines
// are skipped, later lines for the same id win.
Corpus load_corpus(const std::filesystem::path& path,
                   const TripartiteGraph& graph);

}  // namespace exrec
