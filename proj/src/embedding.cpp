#include "exrec/embedding.hpp"

#include <charconv>
#include <cmath>

#include "exrec/errors.hpp"
#include "exrec/lineio.hpp"
#include "exrec/text.hpp"

namespace exrec {

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(Errc::dimension_mismatch,
                "vector lengths " + std::to_string(u.size()) + " vs " +
                    std::to_string(v.size()));
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) {
    throw Error(Errc::zero_vector, "cosine of a zero vector");
  }
  double value = dot / (std::sqrt(uu) * std::sqrt(vv));
  return std::min(1.0, std::max(-1.0, value));
}

std::vector<double> embed_tokens(std::span<const std::string> tokens,
                                 uint32_t dim) {
  if (tokens.empty()) {
    throw Error(Errc::empty_token_list, "cannot embed an empty token list");
  }
  std::vector<double> mean(dim, 0.0);
  const double weight = 1.0 / static_cast<double>(tokens.size());
  for (const std::string& token : tokens) {
    mean[fnv1a64(token) % dim] += weight;
  }
  double norm_sq = 0.0;
  for (double component : mean) norm_sq += component * component;
  if (norm_sq == 0.0) {
    throw Error(Errc::zero_vector, "token mean is the zero vector");
  }
  const double inv_norm = 1.0 / std::sqrt(norm_sq);
  for (double& component : mean) component *= inv_norm;
  return mean;
}

EmbeddingTable EmbeddingTable::load_file(const std::filesystem::path& path,
                                         const TripartiteGraph& graph) {
  EmbeddingTable table;
  bool saw_header = false;
  for_each_record(path, [&](std::string_view line, size_t line_no) {
    auto fields = split_tabs(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!saw_header) {
      if (fields.size() != 2 || fields[0] != "DIM") {
        throw Error(Errc::malformed_line,
                    where + ": expected `DIM<TAB><d>` header");
      }
      uint32_t dim = 0;
      auto [ptr, ec] = std::from_chars(fields[1].data(),
                                       fields[1].data() + fields[1].size(),
                                       dim);
      if (ec != std::errc() || ptr != fields[1].data() + fields[1].size() ||
          dim == 0) {
        throw Error(Errc::malformed_line,
                    where + ": bad dimension '" + std::string(fields[1]) +
                        "'");
      }
      table.dim_ = dim;
      saw_header = true;
      return;
    }
    if (fields.size() != 2) {
      throw Error(Errc::malformed_line,
                  where + ": expected `<exercise_id><TAB><c1,...,cd>`");
    }
    auto index = graph.exercise_index(fields[0]);
    auto components = split_commas(fields[1]);
    if (components.size() != table.dim_) {
      throw Error(Errc::dimension_mismatch,
                  where + ": row has " + std::to_string(components.size()) +
                      " components, header says " +
                      std::to_string(table.dim_));
    }
    std::vector<double> row(table.dim_);
    double norm_sq = 0.0;
    for (size_t i = 0; i < components.size(); ++i) {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(
          components[i].data(), components[i].data() + components[i].size(),
          value);
      if (ec != std::errc() ||
          ptr != components[i].data() + components[i].size()) {
        throw Error(Errc::malformed_line,
                    where + ": bad float '" + std::string(components[i]) +
                        "'");
      }
      if (!std::isfinite(value)) {
        throw Error(Errc::malformed_line, where + ": non-finite component");
      }
      row[i] = value;
      norm_sq += value * value;
    }
    if (!index) {
      ++table.unknown_ids_;
      return;
    }
    if (norm_sq == 0.0) {
      ++table.zero_rows_;  // permitted, flagged; dedupe fails open on it
    } else {
      const double inv_norm = 1.0 / std::sqrt(norm_sq);
      for (double& component : row) component *= inv_norm;
    }
    table.rows_[*index] = std::move(row);
  });
  if (!saw_header) {
    throw Error(Errc::empty_file, path.string() + ": no DIM header");
  }
  return table;
}

EmbeddingTable EmbeddingTable::builtin(const Corpus& corpus, uint32_t dim) {
  EmbeddingTable table;
  table.dim_ = dim;
  table.builtin_ = true;
  table.corpus_ = &corpus;
  return table;
}

EmbeddingTable EmbeddingTable::from_rows(
    uint32_t dim, std::unordered_map<uint32_t, std::vector<double>> rows) {
  EmbeddingTable table;
  table.dim_ = dim;
  for (auto& [exercise, row] : rows) {
    if (row.size() != dim) {
      throw Error(Errc::dimension_mismatch,
                  "row for exercise " + std::to_string(exercise) + " has " +
                      std::to_string(row.size()) + " components");
    }
    double norm_sq = 0.0;
    for (double component : row) {
      if (!std::isfinite(component)) {
        throw Error(Errc::malformed_line, "non-finite component");
      }
      norm_sq += component * component;
    }
    if (norm_sq == 0.0) {
      ++table.zero_rows_;
    } else {
      const double inv_norm = 1.0 / std::sqrt(norm_sq);
      for (double& component : row) component *= inv_norm;
    }
  }
  table.rows_ = std::move(rows);
  return table;
}

std::optional<std::vector<double>> EmbeddingTable::vector_for(
    uint32_t exercise) const {
  if (builtin_) {
    const std::string* text = corpus_->text_for(exercise);
    if (!text) return std::nullopt;
    std::vector<std::string> tokens = tokenize(*text);
    if (tokens.empty()) return std::nullopt;
    return embed_tokens(tokens, dim_);
  }
  auto it = rows_.find(exercise);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

}  // namespace exrec
