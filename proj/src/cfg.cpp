#include <seeker/cfg.h>

#include <algorithm>
#include <sstream>

namespace seeker {

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Fallthrough:
      return "fallthrough";
    case EdgeKind::Branch:
      return "branch";
    case EdgeKind::Jump:
      return "jump";
    case EdgeKind::Case:
      return "case";
    case EdgeKind::Default:
      return "default";
  }
  return "?";
}

std::vector<CfgEdge> Cfg::edges() const {
  std::vector<CfgEdge> all;
  for (const auto& out : succ_) {
    all.insert(all.end(), out.begin(), out.end());
  }
  return all;
}

bool Cfg::dominates(std::size_t dominator, std::size_t node) const {
  if (!reachable_.at(node) || !reachable_.at(dominator)) {
    return false;
  }
  std::optional<std::size_t> current = node;
  while (current) {
    if (*current == dominator) {
      return true;
    }
    current = idom_[*current];
  }
  return false;
}

Cfg build_cfg(const IRMethod& method) {
  Cfg cfg;
  cfg.method_ = method.id;
  const auto n = method.body.size();
  cfg.succ_.resize(n);
  cfg.pred_.resize(n);
  auto target = [&](const std::string& label) {
    return method.labels.at(label);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = method.body[i];
    auto& out = cfg.succ_[i];
    auto fallthrough = [&] {
      if (i + 1 < n) {
        out.push_back({i, i + 1, EdgeKind::Fallthrough, 0});
      }
    };
    if (s.as<stmt::Return>()) {
      cfg.exits_.push_back(i);
    } else if (const auto* g = s.as<stmt::Goto>()) {
      out.push_back({i, target(g->target), EdgeKind::Jump, 0});
    } else if (const auto* b = s.as<stmt::IfCmp>()) {
      out.push_back({i, target(b->target), EdgeKind::Branch, 0});
      fallthrough();
    } else if (const auto* sw = s.as<stmt::Switch>()) {
      for (const auto& [value, label] : sw->cases) {
        out.push_back({i, target(label), EdgeKind::Case, value});
      }
      out.push_back({i, target(sw->default_target), EdgeKind::Default, 0});
    } else {
      fallthrough();
    }
  }
  for (const auto& out : cfg.succ_) {
    for (const auto& e : out) {
      auto& preds = cfg.pred_[e.to];
      if (std::find(preds.begin(), preds.end(), e.from) == preds.end()) {
        preds.push_back(e.from);
      }
    }
  }
  for (auto& preds : cfg.pred_) {
    std::sort(preds.begin(), preds.end());
  }
  cfg.compute_dominators();
  return cfg;
}

void Cfg::compute_dominators() {
  const auto n = succ_.size();
  reachable_.assign(n, false);
  idom_.assign(n, std::nullopt);
  rpo_.clear();
  rpo_index_.assign(n, 0);
  if (n == 0) {
    return;
  }

  // Iterative DFS post-order from the entry.
  std::vector<std::size_t> post;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  reachable_[0] = true;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < succ_[node].size()) {
      auto to = succ_[node][next++].to;
      if (!reachable_[to]) {
        reachable_[to] = true;
        stack.emplace_back(to, 0);
      }
    } else {
      post.push_back(node);
      stack.pop_back();
    }
  }
  rpo_.assign(post.rbegin(), post.rend());
  for (std::size_t i = 0; i < rpo_.size(); ++i) {
    rpo_index_[rpo_[i]] = i;
  }

  // Cooper, Harvey & Kennedy: iterate idoms in RPO until stable.
  std::vector<std::optional<std::size_t>> doms(n);
  doms[0] = 0;
  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      while (rpo_index_[a] > rpo_index_[b]) {
        a = *doms[a];
      }
      while (rpo_index_[b] > rpo_index_[a]) {
        b = *doms[b];
      }
    }
    return a;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 1; k < rpo_.size(); ++k) {
      auto node = rpo_[k];
      std::optional<std::size_t> new_idom;
      for (auto p : pred_[node]) {
        if (!reachable_[p] || !doms[p]) {
          continue;
        }
        new_idom = new_idom ? intersect(p, *new_idom) : p;
      }
      if (new_idom && doms[node] != new_idom) {
        doms[node] = new_idom;
        changed = true;
      }
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (reachable_[i]) {
      idom_[i] = doms[i];
    }
  }
}

namespace {

bool reaches_avoiding(const Cfg& cfg,
                      std::size_t from,
                      std::size_t to,
                      std::size_t avoid) {
  if (from == avoid) {
    return false;
  }
  std::vector<bool> seen(cfg.size(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    auto node = stack.back();
    stack.pop_back();
    if (node == to) {
      return true;
    }
    for (const auto& e : cfg.successors(node)) {
      if (e.to != avoid && !seen[e.to]) {
        seen[e.to] = true;
        stack.push_back(e.to);
      }
    }
  }
  return false;
}

bool is_conditional(const Cfg& cfg, std::size_t node) {
  for (const auto& e : cfg.successors(node)) {
    if (e.kind == EdgeKind::Branch || e.kind == EdgeKind::Case ||
        e.kind == EdgeKind::Default) {
      return true;
    }
  }
  return false;
}

} // namespace

std::vector<Guard> dominating_guards(const Cfg& cfg, std::size_t node) {
  std::vector<Guard> guards;
  if (node >= cfg.size() || !cfg.reachable(node)) {
    return guards;
  }
  for (auto d = cfg.idom(node); d; d = cfg.idom(*d)) {
    if (!is_conditional(cfg, *d)) {
      continue;
    }
    std::optional<CfgEdge> only;
    int reaching = 0;
    for (const auto& e : cfg.successors(*d)) {
      if (reaches_avoiding(cfg, e.to, node, *d)) {
        ++reaching;
        only = e;
      }
    }
    if (reaching == 1) {
      guards.push_back({*d, *only});
    }
  }
  std::reverse(guards.begin(), guards.end());
  return guards;
}

std::string cfg_to_dot(const Cfg& cfg, const IRMethod& method) {
  std::ostringstream out;
  auto escape = [](const std::string& text) {
    std::string e;
    for (char c : text) {
      if (c == '"' || c == '\\') {
        e += '\\';
      }
      e += c;
    }
    return e;
  };
  out << "digraph \"" << escape(method.sig.key()) << "\" {\n";
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    out << "  n" << i << " [label=\"" << i << ": "
        << escape(print_statement(method.body[i])) << "\"];\n";
  }
  for (const auto& e : cfg.edges()) {
    out << "  n" << e.from << " -> n" << e.to << " [label=\""
        << to_string(e.kind);
    if (e.kind == EdgeKind::Case) {
      out << " " << e.case_value;
    }
    out << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

} // namespace seeker
