#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "exrec/corpus.hpp"
#include "exrec/graph.hpp"

namespace exrec {

// Cosine similarity, clamped to [-1, 1]. Throws DimensionMismatch /
// ZeroVector.
double cosine(std::span<const double> u, std::span<const double> v);

// Builtin embedder: mean of per-token indicator vectors (index =
// fnv1a64(token) mod dim), L2-normalized. Throws EmptyTokenList; a zero
// mean cannot occur with indicator vectors, but ZeroVector is raised if
// it ever does.
std::vector<double> embed_tokens(std::span<const std::string> tokens,
                                 uint32_t dim);

inline constexpr uint32_t kBuiltinEmbeddingDim = 256;

// Exercise embeddings, either loaded from file (rows L2-normalized at
// load; all-zero rows kept and reported via vector_for as zero) or
// computed on demand from corpus texts with the builtin embedder.
// Stateless after construction; safe for concurrent reads.
class EmbeddingTable {
 public:
  static EmbeddingTable load_file(const std::filesystem::path& path,
                                  const TripartiteGraph& graph);
  static EmbeddingTable builtin(const Corpus& corpus,
                                uint32_t dim = kBuiltinEmbeddingDim);
  // Programmatic ingestion; rows are L2-normalized, zero rows kept and
  // flagged.
  static EmbeddingTable from_rows(
      uint32_t dim, std::unordered_map<uint32_t, std::vector<double>> rows);

  uint32_t dim() const { return dim_; }

  // Embedding for an exercise index; nullopt when the table has no row
  // (or, in builtin mode, the corpus has no usable text).
  std::optional<std::vector<double>> vector_for(uint32_t exercise) const;

  // File-load diagnostics.
  uint32_t unknown_ids() const { return unknown_ids_; }
  uint32_t zero_rows() const { return zero_rows_; }

 private:
  EmbeddingTable() = default;

  uint32_t dim_ = 0;
  bool builtin_ = false;
  const Corpus* corpus_ = nullptr;
  std::unordered_map<uint32_t, std::vector<double>> rows_;
  uint32_t unknown_ids_ = 0;
  uint32_t zero_rows_ = 0;
};

}  // namespace exrec
