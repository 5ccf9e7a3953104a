#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlsl/common.hpp"

namespace mlsl {

// Sparse bipartite +-1 vote structure for the label-aggregation baselines.
struct VoteEntry {
  int item = -1;
  int worker = -1;
  int value = 0;  // -1 or +1
};

class VoteMatrix {
 public:
  VoteMatrix(int n_items, int n_workers);

  // At most one vote per (item, worker) pair.
  void add_vote(int item, int worker, int value);

  int item_count() const { return n_items_; }
  int worker_count() const { return n_workers_; }
  const std::vector<VoteEntry>& votes() const { return votes_; }
  const std::vector<std::vector<int>>& item_votes() const {
    return item_votes_;
  }
  const std::vector<std::vector<int>>& worker_votes() const {
    return worker_votes_;
  }

  // Every item needs at least one vote before the baselines run.
  void validate() const;

 private:
  int n_items_;
  int n_workers_;
  std::vector<VoteEntry> votes_;
  std::vector<std::vector<int>> item_votes_;    // vote indices per item
  std::vector<std::vector<int>> worker_votes_;  // vote indices per worker
};

// Sparse (item, worker, grade) triples, grades real-valued in [0, max].
struct GradeEntry {
  int item = -1;
  int worker = -1;
  double grade = 0.0;
};

class GradeMatrix {
 public:
  GradeMatrix(int n_items, int n_workers, double max_grade = 10.0);

  void add_grade(int item, int worker, double grade);

  int item_count() const { return n_items_; }
  int worker_count() const { return n_workers_; }
  double max_grade() const { return max_grade_; }
  const std::vector<GradeEntry>& grades() const { return grades_; }
  const std::vector<std::vector<int>>& item_grades() const {
    return item_grades_;
  }
  const std::vector<std::vector<int>>& worker_grades() const {
    return worker_grades_;
  }

 private:
  int n_items_;
  int n_workers_;
  double max_grade_;
  std::vector<GradeEntry> grades_;
  std::vector<std::vector<int>> item_grades_;
  std::vector<std::vector<int>> worker_grades_;
};

// Sign of the per-item vote sum; ties go to +1.
std::vector<int> majority_vote(const VoteMatrix& v);

// Message state of the iterative algorithm, exposed for inspection and for
// the reduced-form tests. One entry per vote in each direction.
struct KosMessages {
  std::vector<double> item_to_worker;  // x_{i->j}, indexed like votes()
  std::vector<double> worker_to_item;  // y_{j->i}
};

struct KosResult {
  std::vector<int> labels;  // per item, -1/+1
  KosMessages messages;
};

// Iterative message-passing aggregation with leave-one-out sums:
//   x_{i->j} <- sum_{j' != j} A_{ij'} y_{j'->i}
//   y_{j->i} <- sum_{i' != i} A_{i'j} x_{i'->j}
// run for k_max rounds, and item i decided by sign(sum_j A_ij y_{j->i})
// where the deciding y is the one the final x-round consumed (the last
// y-refresh is not part of the estimate). Zero statistic decides +1.
// init_y holds one initial worker->item message per vote, in vote order.
KosResult kos_run(const VoteMatrix& v, int k_max,
                  const std::vector<double>& init_y);

// Standard entry point: initial y i.i.d. Normal(1,1), drawn in vote
// insertion order from the seeded stream. This draw order is part of the
// contract so that independent implementations can agree exactly.
std::vector<int> kos(const VoteMatrix& v, int k_max, std::uint64_t seed);

struct EmBooleanResult {
  std::vector<int> labels;              // per item
  std::vector<double> reliabilities;    // per worker, in (0, 1)
  std::vector<double> posterior_plus;   // per item, P(label = +1)
};

// One-coin worker model with a Beta(alpha, beta) prior, MAP updates.
// Item posteriors start uniform; each iteration re-estimates worker
// reliabilities from the posteriors (M-step), then refreshes the
// posteriors (E-step). Labels: sign(P - 0.5), ties +1.
EmBooleanResult em_boolean(const VoteMatrix& v, double alpha = 1.2,
                           double beta = 1.0, int iters = 20);

// Arithmetic mean per item, rounded half-up, clamped to [0, max].
std::vector<int> average_grade(const GradeMatrix& g);

struct EmGradesResult {
  std::vector<double> estimates;       // per item, real-valued
  std::vector<double> worker_variance; // per worker, >= var_floor
  std::vector<int> rounded;            // half-up rounding of estimates
};

// Variance-weighted grade aggregation: item estimates start at plain
// means; each iteration recomputes worker variances against the current
// estimates (floored) and re-estimates items by inverse-variance weights.
EmGradesResult em_grades(const GradeMatrix& g, int iters = 10,
                         double var_floor = 0.05);

// Draws i.i.d. labels from the empirical distribution of train_labels.
std::vector<int> proportional_guess(const std::vector<int>& train_labels,
                                    std::size_t test_size,
                                    std::uint64_t seed);

}  // namespace mlsl
