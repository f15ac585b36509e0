#include "ctaylor/collapse.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace ctaylor {

using ir::Graph;
using ir::Node;
using ir::NodeId;
using ir::Op;

std::string RewriteReport::csv_header() {
  return "replicates_moved,sums_moved,nodes_before,nodes_after,batched_vectors_before,batched_vectors_after";
}

std::string RewriteReport::csv_row() const {
  std::ostringstream os;
  os << replicates_moved << ',' << sums_moved << ',' << nodes_before << ',' << nodes_after << ','
     << batched_vectors_before << ',' << batched_vectors_after;
  return os.str();
}

namespace {

// Copy of a node with fresh inputs, batching recomputed by append.
Node with_inputs(const Node& n, std::vector<NodeId> inputs) {
  Node c = n;
  c.inputs = std::move(inputs);
  c.batched = n.op == Op::Leaf ? n.batched : false;
  c.directions = 0;
  return c;
}

std::string cse_key(const Node& n) {
  std::ostringstream os;
  os << static_cast<int>(n.op) << '|' << n.name << '|' << n.count << '|' << n.order << '|' << std::hexfloat << n.factor
     << std::defaultfloat << '|'
     << n.spec.to_string() << '|';
  for (NodeId i : n.inputs) os << i << ',';
  return os.str();
}

class Pusher {
 public:
  Pusher(const Graph& in, RewriteReport* report) : in_(in), report_(report) { out_.params() = in.params(); }

  Graph run() {
    for (std::size_t i = 0; i < in_.size(); ++i) map_.push_back(visit(in_.nodes()[i]));
    return std::move(out_);
  }

 private:
  // A value in the new graph, possibly standing for replicate(id, copies).
  struct Mapped {
    NodeId id;
    std::optional<std::size_t> copies;
  };

  void moved() {
    if (report_) ++report_->replicates_moved;
  }

  NodeId materialize(const Mapped& m) {
    if (!m.copies) return m.id;
    auto key = std::make_pair(m.id, *m.copies);
    if (auto it = replicas_.find(key); it != replicas_.end()) return it->second;
    return replicas_[key] = out_.replicate(m.id, *m.copies);
  }

  NodeId append_shared(Node n) {
    std::string key = cse_key(n);
    if (auto it = shared_.find(key); it != shared_.end()) return it->second;
    return shared_[key] = out_.append(std::move(n));
  }

  Mapped visit(const Node& n) {
    std::vector<Mapped> args;
    for (NodeId i : n.inputs) args.push_back(map_[static_cast<std::size_t>(i)]);
    bool any_replicated = false;
    bool any_batched = false;
    std::size_t copies = 0;
    for (const Mapped& a : args) {
      if (a.copies) {
        any_replicated = true;
        copies = *a.copies;
      } else if (out_.node(a.id).batched) {
        any_batched = true;
      }
    }

    switch (n.op) {
      case Op::Replicate: return {args[0].id, n.count};
      case Op::Output: return {out_.append(with_inputs(n, {materialize(args[0])})), std::nullopt};
      case Op::Sum:
        if (args[0].copies) {
          moved();
          NodeId s = out_.scale(static_cast<double>(*args[0].copies), args[0].id);
          if (n.slot) out_.set_slot(s, *n.slot);
          return {s, std::nullopt};
        }
        break;
      default: break;
    }

    std::vector<NodeId> ids;
    if (!any_replicated) {
      for (const Mapped& a : args) ids.push_back(a.id);
      return {out_.append(with_inputs(n, ids)), std::nullopt};
    }

    if (!any_batched) {
      // Every batched input is a replicate: compute once, replicate after.
      for (const Mapped& a : args) ids.push_back(a.id);
      Node c = with_inputs(n, ids);
      std::optional<std::size_t> result_copies = copies;
      if (n.op == Op::Contract) {
        c.spec.operands.assign(ids.size(), false);
        if (!n.spec.output) {
          c.factor *= static_cast<double>(copies);  // sum of R identical products
          result_copies.reset();
        }
        c.spec.output = false;
      }
      moved();
      return {append_shared(std::move(c)), result_copies};
    }

    if (n.op == Op::Contract || n.op == Op::Add) {
      // Mixed: replicated operands are consumed unbatched by broadcasting.
      Node c = with_inputs(n, {});
      for (std::size_t k = 0; k < args.size(); ++k) {
        c.inputs.push_back(args[k].id);
        if (n.op == Op::Contract && args[k].copies) c.spec.operands[k] = false;
      }
      moved();
      return {out_.append(std::move(c)), std::nullopt};
    }

    for (const Mapped& a : args) ids.push_back(materialize(a));
    return {out_.append(with_inputs(n, ids)), std::nullopt};
  }

  const Graph& in_;
  RewriteReport* report_;
  Graph out_;
  std::vector<Mapped> map_;
  std::map<std::pair<NodeId, std::size_t>, NodeId> replicas_;
  std::map<std::string, NodeId> shared_;
};

class Puller {
 public:
  Puller(const Graph& in, RewriteReport* report) : in_(in), report_(report) { out_.params() = in.params(); }

  Graph run() {
    for (std::size_t i = 0; i < in_.size(); ++i) {
      const Node& n = in_.nodes()[i];
      if (n.op == Op::Sum) {
        map_.push_back(sum_of(n.inputs[0]));
        continue;
      }
      std::vector<NodeId> ids;
      for (NodeId k : n.inputs) ids.push_back(mapped(k));
      map_.push_back(out_.append(with_inputs(n, ids)));
    }
    return std::move(out_);
  }

 private:
  NodeId mapped(NodeId old) const { return map_[static_cast<std::size_t>(old)]; }

  void moved() {
    if (report_) ++report_->sums_moved;
  }

  NodeId tagged(NodeId id, const Node& source) {
    if (source.slot && !out_.node(id).slot) out_.set_slot(id, *source.slot);
    return id;
  }

  // A node in the new graph holding the direction sum of old node `old`.
  NodeId sum_of(NodeId old) {
    if (auto it = memo_.find(old); it != memo_.end()) return it->second;
    const Node& n = in_.node(old);
    NodeId result = -1;
    switch (n.op) {
      case Op::Replicate:
        moved();
        result = out_.scale(static_cast<double>(n.count), mapped(n.inputs[0]));
        break;
      case Op::Add: {
        moved();
        std::vector<NodeId> parts;
        for (NodeId k : n.inputs) {
          const Node& in = in_.node(k);
          parts.push_back(in.batched ? sum_of(k) : out_.scale(static_cast<double>(n.directions), mapped(k)));
        }
        result = out_.add(parts[0], parts[1]);
        break;
      }
      case Op::Scale:
        moved();
        result = out_.scale(n.factor, sum_of(n.inputs[0]));
        break;
      case Op::Neg:
        moved();
        result = out_.unary(Op::Neg, sum_of(n.inputs[0]));
        break;
      case Op::Linear:
        moved();
        result = out_.linear(sum_of(n.inputs[0]), mapped(n.inputs[1]));
        break;
      case Op::Contract: {
        moved();
        const auto batched = static_cast<std::size_t>(std::count(n.spec.operands.begin(), n.spec.operands.end(), true));
        std::vector<NodeId> ops;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          // Linear in a single batched operand: move the sum onto it.
          ops.push_back(batched == 1 && n.spec.operands[k] ? sum_of(n.inputs[k]) : mapped(n.inputs[k]));
        }
        const bool any = std::any_of(ops.begin(), ops.end(), [&](NodeId k) { return out_.node(k).batched; });
        if (any)
          result = out_.contract(n.factor, ops, true);
        else if (batched == 1)
          result = out_.contract(n.factor, ops, false);
        else
          result = out_.scale(static_cast<double>(n.directions), out_.contract(n.factor, ops, false));
        break;
      }
      default:
        result = out_.sum(mapped(old));
        break;
    }
    tagged(result, n);
    return memo_[old] = result;
  }

  const Graph& in_;
  RewriteReport* report_;
  Graph out_;
  std::vector<NodeId> map_;
  std::map<NodeId, NodeId> memo_;
};

}  // namespace

Graph push_replicate_down(const Graph& graph, RewriteReport* report) {
  Graph out = prune(Pusher(graph, report).run());
  return out;
}

Graph pull_sum_up(const Graph& graph, RewriteReport* report) { return prune(Puller(graph, report).run()); }

CollapseResult collapse(const Graph& graph) {
  CollapseResult result;
  RewriteReport& r = result.report;
  r.nodes_before = graph.size();
  r.batched_vectors_before = vectors_per_node(graph);
  result.graph = pull_sum_up(push_replicate_down(graph, &r), &r);
  r.nodes_after = result.graph.size();
  r.batched_vectors_after = vectors_per_node(result.graph);
  return result;
}

std::map<int, std::size_t> vectors_by_node(const Graph& graph) {
  std::vector<bool> varying(graph.size(), false);
  // (node, degree, group) -> widest live value tagged with it
  std::map<ir::JetSlot, std::size_t> widths;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const Node& n = graph.nodes()[i];
    if (n.op == Op::Leaf) {
      varying[i] = n.batched;
    } else if (n.batched && n.op != Op::Replicate) {
      for (NodeId k : n.inputs) varying[i] = varying[i] || varying[static_cast<std::size_t>(k)];
    }
    if (!n.slot) continue;
    ir::JetSlot key = *n.slot;
    if (key.degree == 0) key.group = 0;
    std::size_t w = varying[i] ? n.directions : 1;
    widths[key] = std::max(widths[key], w);
  }
  std::map<int, std::size_t> per_node;
  for (const auto& [slot, w] : widths) per_node[slot.node] += w;
  return per_node;
}

std::size_t vectors_per_node(const Graph& graph) {
  std::size_t best = 0;
  for (const auto& [node, count] : vectors_by_node(graph)) best = std::max(best, count);
  return best;
}

}  // namespace ctaylor
