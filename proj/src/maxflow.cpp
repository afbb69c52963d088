#include "coseg/maxflow.hpp"

#include <algorithm>

#include "coseg/errors.hpp"

namespace coseg {

MaxFlowGraph::MaxFlowGraph(int node_count) {
  add_nodes(node_count);
}

int MaxFlowGraph::add_nodes(int count) {
  if (count < 0) {
    throw ArgumentError("MaxFlowGraph: negative node count");
  }
  const int first = node_count();
  nodes_.resize(nodes_.size() + count);
  return first;
}

void MaxFlowGraph::add_edge(int u, int v, double capacity, double reverse_capacity) {
  if (u < 0 || v < 0 || u >= node_count() || v >= node_count() || u == v) {
    throw ArgumentError("MaxFlowGraph: bad edge endpoints");
  }
  if (!(capacity >= 0.0) || !(reverse_capacity >= 0.0)) {
    throw ArgumentError("MaxFlowGraph: capacities must be non-negative");
  }
  const int a = static_cast<int>(arcs_.size());
  arcs_.push_back({v, nodes_[u].first, a + 1, capacity, capacity});
  arcs_.push_back({u, nodes_[v].first, a, reverse_capacity, reverse_capacity});
  nodes_[u].first = a;
  nodes_[v].first = a + 1;
}

void MaxFlowGraph::add_terminal_weights(int u, double source_capacity, double sink_capacity) {
  if (!(source_capacity >= 0.0) || !(sink_capacity >= 0.0)) {
    throw ArgumentError("MaxFlowGraph: capacities must be non-negative");
  }
  Node& n = nodes_[u];
  n.source_cap += source_capacity;
  n.sink_cap += sink_capacity;
  const double delta = n.tr_cap;
  if (delta > 0) {
    source_capacity += delta;
  } else {
    sink_capacity -= delta;
  }
  flow_ += std::min(source_capacity, sink_capacity);
  n.tr_cap = source_capacity - sink_capacity;
}

void MaxFlowGraph::set_active(int i) {
  if (!nodes_[i].active) {
    nodes_[i].active = true;
    active_.push_back(i);
  }
}

int MaxFlowGraph::next_active() {
  while (!active_.empty()) {
    const int i = active_.front();
    active_.pop_front();
    nodes_[i].active = false;
    if (nodes_[i].parent != kNoParent) {
      return i;
    }
  }
  return -1;
}

void MaxFlowGraph::orphan_front(int i) {
  nodes_[i].parent = kOrphan;
  orphans_.push_front(i);
}

void MaxFlowGraph::orphan_rear(int i) {
  nodes_[i].parent = kOrphan;
  orphans_.push_back(i);
}

// `middle` runs from a source-tree node to a sink-tree node.
void MaxFlowGraph::augment(int middle) {
  double bottleneck = arcs_[middle].rcap;
  int i = arcs_[arcs_[middle].sister].head;
  for (;;) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) {
      break;
    }
    bottleneck = std::min(bottleneck, arcs_[arcs_[a].sister].rcap);
    i = arcs_[a].head;
  }
  bottleneck = std::min(bottleneck, nodes_[i].tr_cap);
  i = arcs_[middle].head;
  for (;;) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) {
      break;
    }
    bottleneck = std::min(bottleneck, arcs_[a].rcap);
    i = arcs_[a].head;
  }
  bottleneck = std::min(bottleneck, -nodes_[i].tr_cap);

  arcs_[arcs_[middle].sister].rcap += bottleneck;
  arcs_[middle].rcap -= bottleneck;

  i = arcs_[arcs_[middle].sister].head;
  for (;;) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) {
      break;
    }
    arcs_[a].rcap += bottleneck;
    arcs_[arcs_[a].sister].rcap -= bottleneck;
    if (arcs_[arcs_[a].sister].rcap == 0.0) {
      orphan_front(i);
    }
    i = arcs_[a].head;
  }
  nodes_[i].tr_cap -= bottleneck;
  if (nodes_[i].tr_cap == 0.0) {
    orphan_front(i);
  }

  i = arcs_[middle].head;
  for (;;) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) {
      break;
    }
    arcs_[arcs_[a].sister].rcap += bottleneck;
    arcs_[a].rcap -= bottleneck;
    if (arcs_[a].rcap == 0.0) {
      orphan_front(i);
    }
    i = arcs_[a].head;
  }
  nodes_[i].tr_cap += bottleneck;
  if (nodes_[i].tr_cap == 0.0) {
    orphan_front(i);
  }
  flow_ += bottleneck;
}

// Finds a new parent for orphan i within its own tree, or frees it.
void MaxFlowGraph::adopt(int i) {
  const bool sink_tree = nodes_[i].is_sink;
  // Residual capacity usable to keep i attached through arc a0 (i -> head).
  auto usable = [&](int a0) { return sink_tree ? arcs_[a0].rcap : arcs_[arcs_[a0].sister].rcap; };

  int best_arc = -1;
  int best_dist = kInfiniteDist;
  for (int a0 = nodes_[i].first; a0 >= 0; a0 = arcs_[a0].next) {
    if (usable(a0) <= 0.0) {
      continue;
    }
    int j = arcs_[a0].head;
    if (nodes_[j].is_sink != sink_tree || nodes_[j].parent == kNoParent) {
      continue;
    }
    // Walk to the terminal to confirm j is rooted, measuring the distance.
    int d = 0;
    for (;;) {
      if (nodes_[j].ts == time_) {
        d += nodes_[j].dist;
        break;
      }
      const int a = nodes_[j].parent;
      ++d;
      if (a == kTerminal) {
        nodes_[j].ts = time_;
        nodes_[j].dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfiniteDist;
        break;
      }
      j = arcs_[a].head;
    }
    if (d < kInfiniteDist) {
      if (d < best_dist) {
        best_arc = a0;
        best_dist = d;
      }
      for (j = arcs_[a0].head; nodes_[j].ts != time_; j = arcs_[nodes_[j].parent].head) {
        nodes_[j].ts = time_;
        nodes_[j].dist = d--;
      }
    }
  }

  if (best_arc >= 0) {
    nodes_[i].parent = best_arc;
    nodes_[i].ts = time_;
    nodes_[i].dist = best_dist + 1;
    return;
  }

  nodes_[i].parent = kNoParent;
  for (int a0 = nodes_[i].first; a0 >= 0; a0 = arcs_[a0].next) {
    const int j = arcs_[a0].head;
    const int a = nodes_[j].parent;
    if (nodes_[j].is_sink != sink_tree || a == kNoParent) {
      continue;
    }
    if (usable(a0) > 0.0) {
      set_active(j);
    }
    if (a != kTerminal && a != kOrphan && arcs_[a].head == i) {
      orphan_rear(j);
    }
  }
}

double MaxFlowGraph::solve() {
  if (solved_) {
    return flow_;
  }
  solved_ = true;
  for (int i = 0; i < node_count(); ++i) {
    Node& n = nodes_[i];
    n.ts = 0;
    n.dist = 1;
    if (n.tr_cap > 0.0) {
      n.is_sink = false;
      n.parent = kTerminal;
      set_active(i);
    } else if (n.tr_cap < 0.0) {
      n.is_sink = true;
      n.parent = kTerminal;
      set_active(i);
    } else {
      n.parent = kNoParent;
    }
  }

  int current = -1;
  for (;;) {
    int i = current;
    current = -1;
    if (i >= 0 && nodes_[i].parent == kNoParent) {
      i = -1;
    }
    if (i < 0) {
      i = next_active();
      if (i < 0) {
        break;
      }
    }

    int path = -1;
    Node& ni = nodes_[i];
    for (int a = ni.first; a >= 0 && path < 0; a = arcs_[a].next) {
      const int sister = arcs_[a].sister;
      const double residual = ni.is_sink ? arcs_[sister].rcap : arcs_[a].rcap;
      if (residual <= 0.0) {
        continue;
      }
      const int j = arcs_[a].head;
      Node& nj = nodes_[j];
      if (nj.parent == kNoParent) {
        nj.is_sink = ni.is_sink;
        nj.parent = sister;
        nj.ts = ni.ts;
        nj.dist = ni.dist + 1;
        set_active(j);
      } else if (nj.is_sink != ni.is_sink) {
        path = ni.is_sink ? sister : a;
      } else if (nj.ts <= ni.ts && nj.dist > ni.dist) {
        nj.parent = sister;
        nj.ts = ni.ts;
        nj.dist = ni.dist + 1;
      }
    }

    ++time_;
    if (path >= 0) {
      current = i;
      augment(path);
      while (!orphans_.empty()) {
        const int o = orphans_.front();
        orphans_.pop_front();
        adopt(o);
      }
    }
  }
  return flow_;
}

bool MaxFlowGraph::is_source_side(int u) const {
  return nodes_[u].parent != kNoParent && !nodes_[u].is_sink;
}

std::vector<MaxFlowGraph::ArcView> MaxFlowGraph::arcs() const {
  std::vector<ArcView> out;
  out.reserve(arcs_.size());
  for (const auto& a : arcs_) {
    out.push_back({arcs_[a.sister].head, a.head, a.cap});
  }
  return out;
}

double MaxFlowGraph::cut_capacity() const {
  double cut = 0.0;
  for (int u = 0; u < node_count(); ++u) {
    cut += is_source_side(u) ? nodes_[u].sink_cap : nodes_[u].source_cap;
  }
  for (const auto& a : arcs_) {
    if (is_source_side(arcs_[a.sister].head) && !is_source_side(a.head)) {
      cut += a.cap;
    }
  }
  return cut;
}

} // namespace coseg
