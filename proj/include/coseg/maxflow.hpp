#pragma once

#include <cstddef>
#include <deque>
#include <vector>

namespace coseg {

/// s/t flow network solved with the Boykov-Kolmogorov augmenting-path
/// algorithm (two search trees, growth / augmentation / adoption).
///
/// Terminal arcs are given per node with add_terminal_weights; arcs between
/// nonterminal nodes with add_edge. After solve(), a node is on the source
/// side iff it is reachable from the source in the residual graph; nodes with
/// no residual path from either terminal fall on the sink side.
class MaxFlowGraph {
public:
  explicit MaxFlowGraph(int node_count = 0);

  int add_nodes(int count); // returns the index of the first new node
  void add_edge(int u, int v, double capacity, double reverse_capacity);
  void add_terminal_weights(int u, double source_capacity, double sink_capacity);

  double solve();

  bool is_source_side(int u) const;
  double flow() const { return flow_; }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  std::size_t arc_count() const { return arcs_.size(); } // directed, nonterminal

  struct ArcView {
    int from;
    int to;
    double capacity;
  };
  // Capacities as constructed, independent of any flow pushed.
  std::vector<ArcView> arcs() const;
  double source_capacity(int u) const { return nodes_[u].source_cap; }
  double sink_capacity(int u) const { return nodes_[u].sink_cap; }

  /// Capacity of the cut induced by is_source_side.
  double cut_capacity() const;

private:
  static constexpr int kNoParent = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;
  static constexpr int kInfiniteDist = 1 << 30;

  struct Node {
    int first = -1;
    int parent = kNoParent;
    long ts = 0;
    int dist = 0;
    bool is_sink = false;
    bool active = false;
    double tr_cap = 0.0; // >0: residual from source, <0: residual to sink
    double source_cap = 0.0;
    double sink_cap = 0.0;
  };
  struct Arc {
    int head;
    int next;
    int sister;
    double rcap;
    double cap;
  };

  void set_active(int i);
  int next_active();
  void augment(int middle);
  void orphan_front(int i);
  void orphan_rear(int i);
  void adopt(int i);

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::deque<int> active_;
  std::deque<int> orphans_;
  double flow_ = 0.0;
  long time_ = 0;
  bool solved_ = false;
};

} // namespace coseg
