#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "bridge_rate/error.hpp"

namespace bridge_rate {

/// Exact solver for the balanced transportation problem
///   min sum_ij c_ij x_ij  s.t.  sum_j x_ij = supply_i, sum_i x_ij = demand_j, x >= 0
/// on the complete bipartite graph, by the primal network simplex method.
///
/// Spanning-tree bookkeeping (thread / reverse-thread / successor counts,
/// strongly feasible trees rooted at an artificial node) follows the classic
/// formulation used by LEMON's NetworkSimplex; entering arcs are chosen by
/// block search. Supplies are integers so degenerate pivots are detected
/// exactly.
class TransportSimplex {
 public:
  TransportSimplex(std::span<const std::int64_t> supply, std::span<const std::int64_t> demand,
                   std::span<const double> cost)
      : m_(static_cast<int>(supply.size())), k_(static_cast<int>(demand.size())), cost_(cost) {
    require(m_ >= 1 && k_ >= 1, "transport: empty side");
    require(cost.size() == supply.size() * demand.size(), "transport: cost matrix shape mismatch");
    std::int64_t s_total = 0, d_total = 0;
    for (auto s : supply) {
      require(s >= 0, "transport: negative supply");
      s_total += s;
    }
    for (auto d : demand) {
      require(d >= 0, "transport: negative demand");
      d_total += d;
    }
    require(s_total == d_total, "transport: unbalanced problem");
    node_num_ = m_ + k_;
    arc_num_ = m_ * k_;
    supply_.resize(static_cast<std::size_t>(node_num_ + 1));
    for (int i = 0; i < m_; ++i) supply_[static_cast<std::size_t>(i)] = supply[static_cast<std::size_t>(i)];
    for (int j = 0; j < k_; ++j) supply_[static_cast<std::size_t>(m_ + j)] = -demand[static_cast<std::size_t>(j)];
  }

  /// Runs the simplex; returns the optimal cost sum c_ij x_ij.
  double solve() {
    init();
    while (find_entering_arc()) {
      find_join_node();
      const bool change = find_leaving_arc();
      if (delta_ >= kInf) fail(ErrorCode::SolverFailure, "transport: unbounded pivot");
      change_flow(change);
      if (change) {
        update_tree_structure();
        update_potential();
      }
    }
    for (int u = 0; u < node_num_; ++u) {
      if (flow_[static_cast<std::size_t>(arc_num_ + u)] != 0) {
        fail(ErrorCode::SolverFailure, "transport: artificial arc carries flow at optimum");
      }
    }
    double total = 0.0;
    for (int e = 0; e < arc_num_; ++e) {
      const auto f = flow_[static_cast<std::size_t>(e)];
      if (f != 0) total += static_cast<double>(f) * cost_[static_cast<std::size_t>(e)];
    }
    return total;
  }

  std::int64_t flow(int i, int j) const { return flow_[static_cast<std::size_t>(i * k_ + j)]; }
  /// Node potentials after solve(); sources 0..m-1, sinks m..m+k-1.
  double potential(int node) const { return pi_[static_cast<std::size_t>(node)]; }
  std::size_t pivots() const { return pivots_; }

 private:
  static constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  static constexpr int kStateUpper = -1;
  static constexpr int kStateTree = 0;
  static constexpr int kStateLower = 1;
  static constexpr int kDirUp = 1;
  static constexpr int kDirDown = -1;

  int source(int e) const {
    return e < arc_num_ ? e / k_ : art_source_[static_cast<std::size_t>(e - arc_num_)];
  }
  int target(int e) const {
    return e < arc_num_ ? m_ + e % k_ : art_target_[static_cast<std::size_t>(e - arc_num_)];
  }
  double cost(int e) const {
    return e < arc_num_ ? cost_[static_cast<std::size_t>(e)] : art_cost_[static_cast<std::size_t>(e - arc_num_)];
  }

  void init() {
    const auto nodes = static_cast<std::size_t>(node_num_ + 1);
    const auto all_arcs = static_cast<std::size_t>(arc_num_ + node_num_);
    parent_.assign(nodes, -1);
    pred_.assign(nodes, -1);
    thread_.assign(nodes, 0);
    rev_thread_.assign(nodes, 0);
    succ_num_.assign(nodes, 0);
    last_succ_.assign(nodes, 0);
    pred_dir_.assign(nodes, kDirUp);
    pi_.assign(nodes, 0.0);
    flow_.assign(all_arcs, 0);
    state_.assign(all_arcs, static_cast<std::int8_t>(kStateLower));
    art_source_.assign(static_cast<std::size_t>(node_num_), 0);
    art_target_.assign(static_cast<std::size_t>(node_num_), 0);
    art_cost_.assign(static_cast<std::size_t>(node_num_), 0.0);

    double max_cost = 0.0;
    for (double c : cost_) {
      require(std::isfinite(c) && c >= 0.0, "transport: costs must be finite and >= 0");
      max_cost = std::max(max_cost, c);
    }
    const double art_cost = (max_cost + 1.0) * node_num_;
    eps_ = 64.0 * std::numeric_limits<double>::epsilon() * art_cost;

    root_ = node_num_;
    const auto r = static_cast<std::size_t>(root_);
    parent_[r] = -1;
    pred_[r] = -1;
    thread_[r] = 0;
    rev_thread_[0] = root_;
    succ_num_[r] = node_num_ + 1;
    last_succ_[r] = root_ - 1;
    supply_[r] = 0;
    pi_[r] = 0.0;

    for (int u = 0, e = arc_num_; u < node_num_; ++u, ++e) {
      const auto uu = static_cast<std::size_t>(u);
      const auto a = static_cast<std::size_t>(u);
      parent_[uu] = root_;
      pred_[uu] = e;
      thread_[uu] = u + 1;
      rev_thread_[uu + 1] = u;
      succ_num_[uu] = 1;
      last_succ_[uu] = u;
      state_[static_cast<std::size_t>(e)] = kStateTree;
      if (supply_[uu] >= 0) {
        pred_dir_[uu] = kDirUp;
        pi_[uu] = 0.0;
        art_source_[a] = u;
        art_target_[a] = root_;
        flow_[static_cast<std::size_t>(e)] = supply_[uu];
        art_cost_[a] = 0.0;
      } else {
        pred_dir_[uu] = kDirDown;
        pi_[uu] = art_cost;
        art_source_[a] = root_;
        art_target_[a] = u;
        flow_[static_cast<std::size_t>(e)] = -supply_[uu];
        art_cost_[a] = art_cost;
      }
    }
    block_size_ = std::max(static_cast<int>(std::sqrt(static_cast<double>(arc_num_))), 10);
    next_arc_ = 0;
    pivots_ = 0;
  }

  double reduced(int e, int i, int j) const {
    return state_[static_cast<std::size_t>(e)] *
           (cost_[static_cast<std::size_t>(e)] + pi_[static_cast<std::size_t>(i)] -
            pi_[static_cast<std::size_t>(m_ + j)]);
  }

  bool find_entering_arc() {
    double best = -eps_;
    int cnt = block_size_;
    int found = -1;
    int e = next_arc_;
    int i = e / k_, j = e % k_;
    auto scan = [&](int end) -> bool {
      for (; e < end; ++e) {
        const double c = reduced(e, i, j);
        if (c < best) {
          best = c;
          found = e;
        }
        if (++j == k_) {
          j = 0;
          ++i;
        }
        if (--cnt == 0) {
          if (found >= 0) {
            ++e;
            return true;
          }
          cnt = block_size_;
        }
      }
      return false;
    };
    if (!scan(arc_num_)) {
      e = 0;
      i = 0;
      j = 0;
      if (!scan(next_arc_) && found < 0) return false;
    }
    in_arc_ = found;
    next_arc_ = e >= arc_num_ ? 0 : e;
    ++pivots_;
    return true;
  }

  void find_join_node() {
    int u = source(in_arc_), v = target(in_arc_);
    while (u != v) {
      if (succ_num_[static_cast<std::size_t>(u)] < succ_num_[static_cast<std::size_t>(v)]) {
        u = parent_[static_cast<std::size_t>(u)];
      } else {
        v = parent_[static_cast<std::size_t>(v)];
      }
    }
    join_ = u;
  }

  bool find_leaving_arc() {
    int first, second;
    if (state_[static_cast<std::size_t>(in_arc_)] == kStateLower) {
      first = source(in_arc_);
      second = target(in_arc_);
    } else {
      first = target(in_arc_);
      second = source(in_arc_);
    }
    delta_ = kInf;
    int result = 0;
    for (int u = first; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto uu = static_cast<std::size_t>(u);
      std::int64_t d = flow_[static_cast<std::size_t>(pred_[uu])];
      if (pred_dir_[uu] == kDirDown) d = kInf;
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (int u = second; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto uu = static_cast<std::size_t>(u);
      std::int64_t d = flow_[static_cast<std::size_t>(pred_[uu])];
      if (pred_dir_[uu] == kDirUp) d = kInf;
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
    return result != 0;
  }

  void change_flow(bool change) {
    if (delta_ > 0) {
      const std::int64_t val = state_[static_cast<std::size_t>(in_arc_)] * delta_;
      flow_[static_cast<std::size_t>(in_arc_)] += val;
      for (int u = source(in_arc_); u != join_; u = parent_[static_cast<std::size_t>(u)]) {
        const auto uu = static_cast<std::size_t>(u);
        flow_[static_cast<std::size_t>(pred_[uu])] -= pred_dir_[uu] * val;
      }
      for (int u = target(in_arc_); u != join_; u = parent_[static_cast<std::size_t>(u)]) {
        const auto uu = static_cast<std::size_t>(u);
        flow_[static_cast<std::size_t>(pred_[uu])] += pred_dir_[uu] * val;
      }
    }
    if (change) {
      state_[static_cast<std::size_t>(in_arc_)] = kStateTree;
      const int out = pred_[static_cast<std::size_t>(u_out_)];
      state_[static_cast<std::size_t>(out)] =
          flow_[static_cast<std::size_t>(out)] == 0 ? kStateLower : kStateUpper;
    } else {
      state_[static_cast<std::size_t>(in_arc_)] = static_cast<std::int8_t>(-state_[static_cast<std::size_t>(in_arc_)]);
    }
  }

  void update_tree_structure() {
    auto P = [this](int u) -> int& { return parent_[static_cast<std::size_t>(u)]; };
    auto T = [this](int u) -> int& { return thread_[static_cast<std::size_t>(u)]; };
    auto RT = [this](int u) -> int& { return rev_thread_[static_cast<std::size_t>(u)]; };
    auto SN = [this](int u) -> int& { return succ_num_[static_cast<std::size_t>(u)]; };
    auto LS = [this](int u) -> int& { return last_succ_[static_cast<std::size_t>(u)]; };
    auto PR = [this](int u) -> int& { return pred_[static_cast<std::size_t>(u)]; };
    auto PD = [this](int u) -> int& { return pred_dir_[static_cast<std::size_t>(u)]; };

    const int old_rev_thread = RT(u_out_);
    const int old_succ_num = SN(u_out_);
    const int old_last_succ = LS(u_out_);
    v_out_ = P(u_out_);

    if (u_in_ == u_out_) {
      P(u_in_) = v_in_;
      PR(u_in_) = in_arc_;
      PD(u_in_) = u_in_ == source(in_arc_) ? kDirUp : kDirDown;
      if (T(v_in_) != u_out_) {
        int after = T(old_last_succ);
        T(old_rev_thread) = after;
        RT(after) = old_rev_thread;
        after = T(v_in_);
        T(v_in_) = u_out_;
        RT(u_out_) = v_in_;
        T(old_last_succ) = after;
        RT(after) = old_last_succ;
      }
    } else {
      const int thread_continue = old_rev_thread == v_in_ ? T(old_last_succ) : T(v_in_);
      int stem = u_in_;
      int par_stem = v_in_;
      int next_stem;
      int last = LS(u_in_);
      int before, after = T(last);
      T(v_in_) = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        next_stem = P(stem);
        T(last) = next_stem;
        dirty_revs_.push_back(last);
        before = RT(stem);
        T(before) = after;
        RT(after) = before;
        P(stem) = par_stem;
        par_stem = stem;
        stem = next_stem;
        last = LS(stem) == LS(par_stem) ? RT(par_stem) : LS(stem);
        after = T(last);
      }
      P(u_out_) = par_stem;
      T(last) = thread_continue;
      RT(thread_continue) = last;
      LS(u_out_) = last;

      if (old_rev_thread != v_in_) {
        T(old_rev_thread) = after;
        RT(after) = old_rev_thread;
      }
      for (int u : dirty_revs_) RT(T(u)) = u;

      int tmp_sc = 0, tmp_ls = LS(u_out_);
      for (int u = u_out_, p = P(u); u != u_in_; u = p, p = P(u)) {
        PR(u) = PR(p);
        PD(u) = -PD(p);
        tmp_sc += SN(u) - SN(p);
        SN(u) = tmp_sc;
        LS(p) = tmp_ls;
      }
      PR(u_in_) = in_arc_;
      PD(u_in_) = u_in_ == source(in_arc_) ? kDirUp : kDirDown;
      SN(u_in_) = old_succ_num;
    }

    const int up_limit_out = LS(join_) == v_in_ ? join_ : -1;
    const int last_succ_out = LS(u_out_);
    for (int u = v_in_; u != -1 && LS(u) == v_in_; u = P(u)) LS(u) = last_succ_out;

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && LS(u) == old_last_succ; u = P(u)) LS(u) = old_rev_thread;
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && LS(u) == old_last_succ; u = P(u)) LS(u) = last_succ_out;
    }

    for (int u = v_in_; u != join_; u = P(u)) SN(u) += old_succ_num;
    for (int u = v_out_; u != join_; u = P(u)) SN(u) -= old_succ_num;
  }

  void update_potential() {
    const auto ui = static_cast<std::size_t>(u_in_);
    const double sigma = pi_[static_cast<std::size_t>(v_in_)] - pi_[ui] - pred_dir_[ui] * cost(in_arc_);
    const int end = thread_[static_cast<std::size_t>(last_succ_[ui])];
    for (int u = u_in_; u != end; u = thread_[static_cast<std::size_t>(u)]) {
      pi_[static_cast<std::size_t>(u)] += sigma;
    }
  }

  int m_, k_;
  std::span<const double> cost_;
  int node_num_ = 0, arc_num_ = 0, root_ = 0;
  std::vector<std::int64_t> supply_;
  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, pred_dir_;
  std::vector<double> pi_;
  std::vector<std::int64_t> flow_;
  std::vector<std::int8_t> state_;
  std::vector<int> art_source_, art_target_;
  std::vector<double> art_cost_;
  std::vector<int> dirty_revs_;
  double eps_ = 0.0;
  int block_size_ = 10;
  int next_arc_ = 0;
  int in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  std::int64_t delta_ = 0;
  std::size_t pivots_ = 0;
};

}  // namespace bridge_rate
