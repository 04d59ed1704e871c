#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "emob/mode.hpp"

namespace emob {

class GraphBuildError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DuplicateNodeError : public GraphBuildError {
 public:
  using GraphBuildError::GraphBuildError;
};

class DuplicateArcError : public GraphBuildError {
 public:
  using GraphBuildError::GraphBuildError;
};

class DanglingArcError : public GraphBuildError {
 public:
  using GraphBuildError::GraphBuildError;
};

class NonPositiveWeightError : public GraphBuildError {
 public:
  using GraphBuildError::GraphBuildError;
};

class UnknownNodeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Sentinel for "mode not permitted on this arc".
inline constexpr double kNoSpeed = std::numeric_limits<double>::quiet_NaN();

inline bool speed_present(double v) { return !std::isnan(v); }

struct NodeInput {
  NodeId id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct ArcInput {
  NodeId from = 0;
  NodeId to = 0;
  double distance_m = 0.0;
  // NaN entries mean the mode may not traverse this arc.
  PerMode<double> speed_mps = {kNoSpeed, kNoSpeed, kNoSpeed, kNoSpeed};
};

struct Arc {
  NodeId from = 0;
  NodeId to = 0;
  double distance_m = 0.0;
  PerMode<double> speed_mps = {kNoSpeed, kNoSpeed, kNoSpeed, kNoSpeed};

  bool permits(Mode m) const { return speed_present(speed_mps[mode_index(m)]); }
  double speed(Mode m) const { return speed_mps[mode_index(m)]; }
};

// Immutable directed multi-modal road graph in CSR form. Node ids are dense
// non-negative integers so adjacency is array-indexed. Arcs within a row are
// sorted by head id, which fixes the neighbor order every solver relies on.
class MultiModalGraph {
 public:
  static MultiModalGraph build(const std::vector<NodeInput>& nodes,
                               const std::vector<ArcInput>& arcs);

  int num_nodes() const { return static_cast<int>(offsets_.size()) - 1; }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }

  bool has_node(NodeId v) const { return v >= 0 && v < num_nodes(); }

  std::span<const Arc> out_arcs(NodeId v) const {
    check_node(v);
    return {arcs_.data() + offsets_[v], arcs_.data() + offsets_[v + 1]};
  }

  // Arc indices of arcs entering v.
  std::span<const std::int32_t> in_arc_ids(NodeId v) const {
    check_node(v);
    return {in_ids_.data() + in_offsets_[v], in_ids_.data() + in_offsets_[v + 1]};
  }

  const Arc& arc_at(std::int32_t arc_id) const { return arcs_[arc_id]; }

  // Heads of arcs leaving v, ascending. Throws UnknownNodeError.
  std::vector<NodeId> neighbors(NodeId v) const;

  // A_ij: true iff an arc (i, j) exists.
  bool has_arc(NodeId i, NodeId j) const { return find_arc(i, j) != nullptr; }

  const Arc* find_arc(NodeId i, NodeId j) const;

  double node_x(NodeId v) const { return xs_[v]; }
  double node_y(NodeId v) const { return ys_[v]; }

  std::span<const Arc> all_arcs() const { return arcs_; }

 private:
  void check_node(NodeId v) const {
    if (!has_node(v))
      throw UnknownNodeError("unknown node id " + std::to_string(v));
  }

  std::vector<std::int32_t> offsets_;     // size n+1
  std::vector<Arc> arcs_;                 // sorted by (from, to)
  std::vector<std::int32_t> in_offsets_;  // size n+1
  std::vector<std::int32_t> in_ids_;      // arc ids grouped by head
  std::vector<double> xs_, ys_;
};

struct EHub {
  NodeId node = 0;
  std::array<bool, kNumModes> supported = {};  // Walk entry must stay false
  PerMode<double> best_soc_wh = {};            // valid where supported

  bool supports(Mode m) const { return supported[mode_index(m)]; }
  double best_soc(Mode m) const { return best_soc_wh[mode_index(m)]; }
};

class HubRegistry {
 public:
  HubRegistry() = default;
  explicit HubRegistry(std::vector<EHub> hubs);

  int k() const { return static_cast<int>(hubs_.size()); }
  const std::vector<EHub>& hubs() const { return hubs_; }

  // Null when v hosts no hub.
  const EHub* find(NodeId v) const;

  bool is_hub(NodeId v) const { return find(v) != nullptr; }

 private:
  std::vector<EHub> hubs_;  // sorted by node, unique
};

struct Diagnostic {
  std::string code;
  std::string message;
};

struct DiagnosticsReport {
  std::vector<Diagnostic> entries;
  bool ok() const { return entries.empty(); }
};

// Non-failing scenario checks: hubs on nonexistent nodes, hubs no other node
// can reach, zero-SOC vehicle listings.
DiagnosticsReport validate_scenario(const MultiModalGraph& g, const HubRegistry& hubs);

}  // namespace emob
