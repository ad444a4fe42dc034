#include "exrec/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <utility>

#include "exrec/errors.hpp"
#include "exrec/lineio.hpp"

namespace exrec {

const char* node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::Kc:
      return "KC";
    case NodeKind::Exercise:
      return "exercise";
    case NodeKind::Material:
      return "material";
  }
  return "?";
}

namespace {

std::optional<uint32_t> find_in(
    const std::unordered_map<std::string, uint32_t>& lookup,
    std::string_view id) {
  auto it = lookup.find(std::string(id));
  if (it == lookup.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::optional<uint32_t> TripartiteGraph::kc_index(std::string_view id) const {
  return find_in(kc_lookup_, id);
}

std::optional<uint32_t> TripartiteGraph::exercise_index(
    std::string_view id) const {
  return find_in(exercise_lookup_, id);
}

std::optional<uint32_t> TripartiteGraph::material_index(
    std::string_view id) const {
  return find_in(material_lookup_, id);
}

std::span<const uint32_t> TripartiteGraph::kcs_of(uint32_t exercise) const {
  return exercise_to_kc_.row(exercise);
}

std::span<const uint32_t> TripartiteGraph::materials_of(
    uint32_t exercise) const {
  return exercise_to_material_.row(exercise);
}

std::span<const uint32_t> TripartiteGraph::kc_exercises(uint32_t kc) const {
  return kc_to_exercise_.row(kc);
}

std::span<const uint32_t> TripartiteGraph::material_exercises(
    uint32_t material) const {
  return material_to_exercise_.row(material);
}

std::vector<NodeId> TripartiteGraph::incident_pivots(
    std::string_view exercise_id) const {
  auto index = this->exercise_index(exercise_id);
  if (!index) {
    throw Error(Errc::unknown_node,
                "exercise '" + std::string(exercise_id) + "' not in graph");
  }
  std::vector<NodeId> pivots;
  for (uint32_t kc : kcs_of(*index)) {
    pivots.push_back({NodeKind::Kc, kc_ids_[kc]});
  }
  for (uint32_t material : materials_of(*index)) {
    pivots.push_back({NodeKind::Material, material_ids_[material]});
  }
  return pivots;
}

std::vector<NodeId> TripartiteGraph::exercises_of_pivot(
    const NodeId& pivot) const {
  if (pivot.kind == NodeKind::Exercise) {
    throw Error(Errc::wrong_kind,
                "'" + pivot.id + "' is an exercise, not a pivot");
  }
  std::span<const uint32_t> row;
  if (pivot.kind == NodeKind::Kc) {
    auto index = kc_index(pivot.id);
    if (!index) {
      throw Error(Errc::unknown_node, "KC '" + pivot.id + "' not in graph");
    }
    row = kc_exercises(*index);
  } else {
    auto index = material_index(pivot.id);
    if (!index) {
      throw Error(Errc::unknown_node,
                  "material '" + pivot.id + "' not in graph");
    }
    row = material_exercises(*index);
  }
  std::vector<NodeId> exercises;
  exercises.reserve(row.size());
  for (uint32_t exercise : row) {
    exercises.push_back({NodeKind::Exercise, exercise_ids_[exercise]});
  }
  return exercises;
}

std::vector<NodeId> TripartiteGraph::kcs_of_exercise(
    std::string_view exercise_id) const {
  auto index = this->exercise_index(exercise_id);
  if (!index) {
    throw Error(Errc::unknown_node,
                "exercise '" + std::string(exercise_id) + "' not in graph");
  }
  std::vector<NodeId> kcs;
  for (uint32_t kc : kcs_of(*index)) {
    kcs.push_back({NodeKind::Kc, kc_ids_[kc]});
  }
  return kcs;
}

bool TripartiteGraph::operator==(const TripartiteGraph& other) const {
  return kc_ids_ == other.kc_ids_ && exercise_ids_ == other.exercise_ids_ &&
         material_ids_ == other.material_ids_ &&
         kc_to_exercise_ == other.kc_to_exercise_ &&
         exercise_to_kc_ == other.exercise_to_kc_ &&
         exercise_to_material_ == other.exercise_to_material_ &&
         material_to_exercise_ == other.material_to_exercise_;
}

void GraphBuilder::add_node(NodeKind kind, std::string_view id) {
  intern(kind, id);
}

void GraphBuilder::add_e1(std::string_view kc_id,
                          std::string_view exercise_id) {
  uint32_t kc = intern(NodeKind::Kc, kc_id);
  uint32_t exercise = intern(NodeKind::Exercise, exercise_id);
  e1_.emplace_back(kc, exercise);
}

void GraphBuilder::add_e2(std::string_view exercise_id,
                          std::string_view material_id) {
  uint32_t exercise = intern(NodeKind::Exercise, exercise_id);
  uint32_t material = intern(NodeKind::Material, material_id);
  e2_.emplace_back(exercise, material);
}

uint32_t GraphBuilder::intern(NodeKind kind, std::string_view id) {
  if (id.empty()) {
    throw Error(Errc::malformed_line, "empty node identifier");
  }
  if (id.find_first_of("\t\n") != std::string_view::npos) {
    throw Error(Errc::malformed_line,
                "identifier contains tab or newline: '" + std::string(id) +
                    "'");
  }
  std::string key(id);
  auto [kind_it, inserted] = kind_of_.try_emplace(key, kind);
  if (!inserted && kind_it->second != kind) {
    throw Error(Errc::layer_violation,
                "'" + key + "' used both as " +
                    node_kind_name(kind_it->second) + " and as " +
                    node_kind_name(kind));
  }
  auto& lookup = lookup_[static_cast<size_t>(kind)];
  auto& ids = ids_[static_cast<size_t>(kind)];
  auto [it, fresh] = lookup.try_emplace(std::move(key),
                                        static_cast<uint32_t>(ids.size()));
  if (fresh) ids.push_back(it->first);
  return it->second;
}

namespace {

// Sorted interning: remaps first-seen indexes to id-text order so that
// index order equals id order everywhere downstream.
std::vector<uint32_t> sorted_remap(std::vector<std::string>& ids) {
  std::vector<uint32_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](uint32_t a, uint32_t b) { return ids[a] < ids[b]; });
  std::vector<uint32_t> remap(ids.size());
  std::vector<std::string> sorted;
  sorted.reserve(ids.size());
  for (uint32_t rank = 0; rank < order.size(); ++rank) {
    remap[order[rank]] = rank;
    sorted.push_back(std::move(ids[order[rank]]));
  }
  ids = std::move(sorted);
  return remap;
}

// Deduplicates (sorted) edge pairs, returning the number collapsed.
uint64_t dedupe_edges(std::vector<std::pair<uint32_t, uint32_t>>& edges) {
  std::sort(edges.begin(), edges.end());
  auto last = std::unique(edges.begin(), edges.end());
  uint64_t removed = static_cast<uint64_t>(edges.end() - last);
  edges.erase(last, edges.end());
  return removed;
}

detail::Csr build_csr(const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                      size_t rows, bool by_first) {
  detail::Csr csr;
  csr.offsets.assign(rows + 1, 0);
  for (const auto& [a, b] : edges) {
    ++csr.offsets[(by_first ? a : b) + 1];
  }
  for (size_t i = 0; i < rows; ++i) csr.offsets[i + 1] += csr.offsets[i];
  csr.targets.resize(edges.size());
  std::vector<uint64_t> cursor(csr.offsets.begin(), csr.offsets.end() - 1);
  for (const auto& [a, b] : edges) {
    uint32_t row = by_first ? a : b;
    csr.targets[cursor[row]++] = by_first ? b : a;
  }
  for (size_t i = 0; i < rows; ++i) {
    std::sort(csr.targets.begin() + static_cast<ptrdiff_t>(csr.offsets[i]),
              csr.targets.begin() + static_cast<ptrdiff_t>(csr.offsets[i + 1]));
  }
  return csr;
}

}  // namespace

TripartiteGraph GraphBuilder::build(uint64_t* duplicate_edges) {
  auto& kcs = ids_[static_cast<size_t>(NodeKind::Kc)];
  auto& exercises = ids_[static_cast<size_t>(NodeKind::Exercise)];
  auto& materials = ids_[static_cast<size_t>(NodeKind::Material)];
  if (exercises.empty()) {
    throw Error(Errc::empty_graph, "graph declares no exercises");
  }

  std::vector<uint32_t> kc_remap = sorted_remap(kcs);
  std::vector<uint32_t> exercise_remap = sorted_remap(exercises);
  std::vector<uint32_t> material_remap = sorted_remap(materials);
  for (auto& [kc, exercise] : e1_) {
    kc = kc_remap[kc];
    exercise = exercise_remap[exercise];
  }
  for (auto& [exercise, material] : e2_) {
    exercise = exercise_remap[exercise];
    material = material_remap[material];
  }

  uint64_t duplicates = dedupe_edges(e1_) + dedupe_edges(e2_);
  if (duplicate_edges) *duplicate_edges = duplicates;

  TripartiteGraph graph;
  graph.kc_ids_ = std::move(kcs);
  graph.exercise_ids_ = std::move(exercises);
  graph.material_ids_ = std::move(materials);
  for (uint32_t i = 0; i < graph.kc_ids_.size(); ++i)
    graph.kc_lookup_.emplace(graph.kc_ids_[i], i);
  for (uint32_t i = 0; i < graph.exercise_ids_.size(); ++i)
    graph.exercise_lookup_.emplace(graph.exercise_ids_[i], i);
  for (uint32_t i = 0; i < graph.material_ids_.size(); ++i)
    graph.material_lookup_.emplace(graph.material_ids_[i], i);
  graph.kc_to_exercise_ = build_csr(e1_, graph.kc_ids_.size(), true);
  graph.exercise_to_kc_ = build_csr(e1_, graph.exercise_ids_.size(), false);
  graph.exercise_to_material_ =
      build_csr(e2_, graph.exercise_ids_.size(), true);
  graph.material_to_exercise_ =
      build_csr(e2_, graph.material_ids_.size(), false);
  graph.e1_count_ = e1_.size();
  graph.e2_count_ = e2_.size();
  return graph;
}

GraphLoadResult load_graph(const std::filesystem::path& path) {
  GraphBuilder builder;
  for_each_record(path, [&](std::string_view line, size_t line_no) {
    std::vector<std::string_view> fields = split_tabs(line);
    if (fields.size() != 3) {
      throw Error(Errc::malformed_line,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected 3 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    std::string_view tag = fields[0];
    if (tag == "E1") {
      builder.add_e1(fields[1], fields[2]);
    } else if (tag == "E2") {
      builder.add_e2(fields[1], fields[2]);
    } else if (tag == "NODE") {
      NodeKind kind;
      if (fields[1] == "KC") {
        kind = NodeKind::Kc;
      } else if (fields[1] == "EX") {
        kind = NodeKind::Exercise;
      } else if (fields[1] == "MAT") {
        kind = NodeKind::Material;
      } else {
        throw Error(Errc::malformed_line,
                    path.string() + ":" + std::to_string(line_no) +
                        ": unknown node kind '" + std::string(fields[1]) +
                        "'");
      }
      builder.add_node(kind, fields[2]);
    } else {
      throw Error(Errc::malformed_line,
                  path.string() + ":" + std::to_string(line_no) +
                      ": unknown record tag '" + std::string(tag) + "'");
    }
  });
  GraphLoadResult result;
  result.graph = builder.build(&result.duplicate_edges);
  return result;
}

}  // namespace exrec
