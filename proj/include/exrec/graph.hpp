#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace exrec {

namespace detail {

// Compressed sparse rows; one per node of the source kind.
struct Csr {
  std::vector<uint64_t> offsets;  // size = node count + 1
  std::vector<uint32_t> targets;

  std::span<const uint32_t> row(uint32_t index) const {
    return {targets.data() + offsets[index],
            targets.data() + offsets[index + 1]};
  }
  bool operator==(const Csr&) const = default;
};

}  // namespace detail

enum class NodeKind : uint8_t { Kc, Exercise, Material };

const char* node_kind_name(NodeKind kind);

struct NodeId {
  NodeKind kind;
  std::string id;

  auto operator<=>(const NodeId&) const = default;
};

// Immutable tripartite adjacency store. KCs and materials connect only to
// exercises (edge layers E1 and E2 respectively). Node identifiers are
// interned per kind; indexes are assigned in ascending id-text order, so
// index order and id order coincide and every neighbor list is id-sorted.
// Safe for concurrent reads once built.
class TripartiteGraph {
 public:
  uint32_t kc_count() const { return static_cast<uint32_t>(kc_ids_.size()); }
  uint32_t exercise_count() const {
    return static_cast<uint32_t>(exercise_ids_.size());
  }
  uint32_t material_count() const {
    return static_cast<uint32_t>(material_ids_.size());
  }
  uint64_t e1_count() const { return e1_count_; }
  uint64_t e2_count() const { return e2_count_; }

  const std::string& kc_id(uint32_t index) const { return kc_ids_[index]; }
  const std::string& exercise_id(uint32_t index) const {
    return exercise_ids_[index];
  }
  const std::string& material_id(uint32_t index) const {
    return material_ids_[index];
  }

  std::optional<uint32_t> kc_index(std::string_view id) const;
  std::optional<uint32_t> exercise_index(std::string_view id) const;
  std::optional<uint32_t> material_index(std::string_view id) const;

  // Index-level adjacency, id-sorted.
  std::span<const uint32_t> kcs_of(uint32_t exercise) const;
  std::span<const uint32_t> materials_of(uint32_t exercise) const;
  std::span<const uint32_t> kc_exercises(uint32_t kc) const;
  std::span<const uint32_t> material_exercises(uint32_t material) const;

  // Number of incident edges of an exercise across both layers.
  uint32_t exercise_degree(uint32_t exercise) const {
    return static_cast<uint32_t>(kcs_of(exercise).size() +
                                 materials_of(exercise).size());
  }

  // Pivots (KCs then materials) reachable from an exercise, id-sorted
  // within each kind. Throws UnknownNode.
  std::vector<NodeId> incident_pivots(std::string_view exercise_id) const;

  // Exercises connected to a KC or material pivot, id-sorted. Throws
  // UnknownNode / WrongKind.
  std::vector<NodeId> exercises_of_pivot(const NodeId& pivot) const;

  // KCs linked to an exercise via E1, id-sorted. Throws UnknownNode.
  std::vector<NodeId> kcs_of_exercise(std::string_view exercise_id) const;

  bool operator==(const TripartiteGraph& other) const;

 private:
  friend class GraphBuilder;

  using Csr = detail::Csr;

  std::vector<std::string> kc_ids_;
  std::vector<std::string> exercise_ids_;
  std::vector<std::string> material_ids_;
  std::unordered_map<std::string, uint32_t> kc_lookup_;
  std::unordered_map<std::string, uint32_t> exercise_lookup_;
  std::unordered_map<std::string, uint32_t> material_lookup_;
  Csr kc_to_exercise_;
  Csr exercise_to_kc_;
  Csr exercise_to_material_;
  Csr material_to_exercise_;
  uint64_t e1_count_ = 0;
  uint64_t e2_count_ = 0;
};

// Incrementally collects nodes and edges, then validates and freezes them
// into a TripartiteGraph. Duplicate edges collapse; the count is reported
// through GraphLoadResult.
class GraphBuilder {
 public:
  void add_node(NodeKind kind, std::string_view id);
  void add_e1(std::string_view kc_id, std::string_view exercise_id);
  void add_e2(std::string_view exercise_id, std::string_view material_id);

  // Throws EmptyGraph if no exercises were declared.
  TripartiteGraph build(uint64_t* duplicate_edges = nullptr);

 private:
  uint32_t intern(NodeKind kind, std::string_view id);

  std::vector<std::string> ids_[3];
  std::unordered_map<std::string, uint32_t> lookup_[3];
  // Kind of each id text; an id may carry exactly one kind.
  std::unordered_map<std::string, NodeKind> kind_of_;
  std::vector<std::pair<uint32_t, uint32_t>> e1_;  // (kc, exercise)
  std::vector<std::pair<uint32_t, uint32_t>> e2_;  // (exercise, material)
};

struct GraphLoadResult {
  TripartiteGraph graph;
  uint64_t duplicate_edges = 0;
};

// Loads the tab-separated graph format: `E1<TAB>kc<TAB>exercise`,
// `E2<TAB>exercise<TAB>material`, `NODE<TAB>{KC|EX|MAT}<TAB>id`.
// `#` comments and blank lines are skipped.
GraphLoadResult load_graph(const std::filesystem::path& path);

}  // namespace exrec
