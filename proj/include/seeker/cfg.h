#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <seeker/ir.h>

namespace seeker {

enum class EdgeKind {
  Fallthrough, // sequential successor, including the false side of an `if`
  Branch,      // taken side of an `if`
  Jump,        // goto
  Case,        // switch case (see case_value)
  Default,     // switch default
};

std::string_view to_string(EdgeKind kind);

struct CfgEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  EdgeKind kind = EdgeKind::Fallthrough;
  std::int64_t case_value = 0;

  bool operator==(const CfgEdge&) const = default;
};

/// Statement-level control-flow graph of one method. Node i is statement i;
/// node 0 is the entry. Exceptional edges are not modeled.
class Cfg {
 public:
  Cfg() = default;

  MethodId method() const { return method_; }
  std::size_t size() const { return succ_.size(); }
  std::size_t entry() const { return 0; }
  const std::vector<std::size_t>& exits() const { return exits_; }

  const std::vector<CfgEdge>& successors(std::size_t node) const {
    return succ_.at(node);
  }
  /// Distinct predecessor nodes, ascending.
  const std::vector<std::size_t>& predecessors(std::size_t node) const {
    return pred_.at(node);
  }
  std::vector<CfgEdge> edges() const;

  bool reachable(std::size_t node) const { return reachable_.at(node); }
  /// Immediate dominator; nullopt for the entry and unreachable nodes.
  std::optional<std::size_t> idom(std::size_t node) const {
    return idom_.at(node);
  }
  /// Reflexive dominance. False whenever `node` is unreachable.
  bool dominates(std::size_t dominator, std::size_t node) const;
  /// Reachable nodes in reverse post-order.
  const std::vector<std::size_t>& reverse_post_order() const { return rpo_; }

  friend Cfg build_cfg(const IRMethod& method);

 private:
  void compute_dominators();

  MethodId method_ = 0;
  std::vector<std::vector<CfgEdge>> succ_;
  std::vector<std::vector<std::size_t>> pred_;
  std::vector<std::size_t> exits_;
  std::vector<bool> reachable_;
  std::vector<std::optional<std::size_t>> idom_;
  std::vector<std::size_t> rpo_;
  std::vector<std::size_t> rpo_index_;
};

/// Builds the CFG. Unreachable statements stay as isolated or dangling nodes.
Cfg build_cfg(const IRMethod& method);

/// A conditional that controls a statement: every path from the entry passes
/// `node` and leaves it through `edge`.
struct Guard {
  std::size_t node = 0;
  CfgEdge edge;

  bool operator==(const Guard&) const = default;
};

/// `if`/`switch` nodes that dominate `node` and reach it through exactly one
/// out-edge, outermost first.
std::vector<Guard> dominating_guards(const Cfg& cfg, std::size_t node);

/// Graphviz text for one method's CFG.
std::string cfg_to_dot(const Cfg& cfg, const IRMethod& method);

/// Generic forward dataflow over reachable nodes until fixpoint. `transfer`
/// maps (node, in-state) to the out-state; `join` merges into its first
/// argument and returns whether it changed. Returns in-states per node.
template <typename State, typename Transfer, typename Join>
std::vector<std::optional<State>> forward_dataflow(const Cfg& cfg,
                                                   const State& entry_state,
                                                   Transfer transfer,
                                                   Join join) {
  std::vector<std::optional<State>> in(cfg.size());
  if (cfg.size() == 0) {
    return in;
  }
  in[cfg.entry()] = entry_state;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto node : cfg.reverse_post_order()) {
      if (!in[node]) {
        continue;
      }
      State out = transfer(node, *in[node]);
      for (const auto& e : cfg.successors(node)) {
        if (!in[e.to]) {
          in[e.to] = out;
          changed = true;
        } else if (join(*in[e.to], out)) {
          changed = true;
        }
      }
    }
  }
  return in;
}

} // namespace seeker
