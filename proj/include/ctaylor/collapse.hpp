#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "ctaylor/graph.hpp"

namespace ctaylor {

struct RewriteReport {
  std::size_t replicates_moved = 0;
  std::size_t sums_moved = 0;
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  std::size_t batched_vectors_before = 0;
  std::size_t batched_vectors_after = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

// Moves every Replicate past the operations that only consume replicated
// or unbatched values, so shared computations run once. Identical pushed
// nodes are merged.
ir::Graph push_replicate_down(const ir::Graph& graph, RewriteReport* report = nullptr);

// Moves every direction sum towards the leaves through linear operations
// and folds it into nonlinear contractions.
ir::Graph pull_sum_up(const ir::Graph& graph, RewriteReport* report = nullptr);

struct CollapseResult {
  ir::Graph graph;
  RewriteReport report;
};

// push_replicate_down followed by pull_sum_up, with dead nodes removed.
CollapseResult collapse(const ir::Graph& graph);

// Vectors held per function-level node: each tagged jet coefficient counts R
// when it varies across directions and 1 otherwise. Replicates are free.
std::map<int, std::size_t> vectors_by_node(const ir::Graph& graph);
std::size_t vectors_per_node(const ir::Graph& graph);

}  // namespace ctaylor
