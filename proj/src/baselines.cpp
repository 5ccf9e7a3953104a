#include "mlsl/baselines.hpp"

#include <cmath>
#include <map>
#include <string>

#include "mlsl/rng.hpp"

namespace mlsl {

VoteMatrix::VoteMatrix(int n_items, int n_workers)
    : n_items_(n_items), n_workers_(n_workers) {
  if (n_items < 0 || n_workers < 0) {
    throw ValidationError("VoteMatrix: negative size");
  }
  item_votes_.resize(n_items);
  worker_votes_.resize(n_workers);
}

void VoteMatrix::add_vote(int item, int worker, int value) {
  if (item < 0 || item >= n_items_ || worker < 0 || worker >= n_workers_) {
    throw ValidationError("VoteMatrix: vote endpoint out of range");
  }
  if (value != -1 && value != 1) {
    throw ValidationError("VoteMatrix: vote value must be -1 or +1");
  }
  for (int t : item_votes_[item]) {
    if (votes_[t].worker == worker) {
      throw ValidationError("VoteMatrix: duplicate vote for item " +
                            std::to_string(item) + ", worker " +
                            std::to_string(worker));
    }
  }
  int t = static_cast<int>(votes_.size());
  votes_.push_back(VoteEntry{item, worker, value});
  item_votes_[item].push_back(t);
  worker_votes_[worker].push_back(t);
}

void VoteMatrix::validate() const {
  for (int i = 0; i < n_items_; ++i) {
    if (item_votes_[i].empty()) {
      throw ValidationError("VoteMatrix: item " + std::to_string(i) +
                            " has no votes");
    }
  }
}

GradeMatrix::GradeMatrix(int n_items, int n_workers, double max_grade)
    : n_items_(n_items), n_workers_(n_workers), max_grade_(max_grade) {
  if (n_items < 0 || n_workers < 0 || max_grade <= 0.0) {
    throw ValidationError("GradeMatrix: invalid sizes");
  }
  item_grades_.resize(n_items);
  worker_grades_.resize(n_workers);
}

void GradeMatrix::add_grade(int item, int worker, double grade) {
  if (item < 0 || item >= n_items_ || worker < 0 || worker >= n_workers_) {
    throw ValidationError("GradeMatrix: grade endpoint out of range");
  }
  if (!(grade >= 0.0 && grade <= max_grade_)) {
    throw ValidationError("GradeMatrix: grade out of range");
  }
  int t = static_cast<int>(grades_.size());
  grades_.push_back(GradeEntry{item, worker, grade});
  item_grades_[item].push_back(t);
  worker_grades_[worker].push_back(t);
}

std::vector<int> majority_vote(const VoteMatrix& v) {
  v.validate();
  std::vector<int> labels(v.item_count());
  for (int i = 0; i < v.item_count(); ++i) {
    long sum = 0;
    for (int t : v.item_votes()[i]) sum += v.votes()[t].value;
    labels[i] = sum >= 0 ? 1 : -1;
  }
  return labels;
}

KosResult kos_run(const VoteMatrix& v, int k_max,
                  const std::vector<double>& init_y) {
  v.validate();
  if (k_max < 1) throw ValidationError("kos: k_max must be >= 1");
  if (init_y.size() != v.votes().size()) {
    throw ValidationError("kos: init_y size must equal vote count");
  }
  const auto& votes = v.votes();
  const std::size_t n = votes.size();

  KosResult res;
  res.messages.worker_to_item = init_y;
  res.messages.item_to_worker.assign(n, 0.0);
  auto& x = res.messages.item_to_worker;
  auto& y = res.messages.worker_to_item;

  for (int k = 1; k <= k_max; ++k) {
    // Leave-one-out item sums.
    for (int i = 0; i < v.item_count(); ++i) {
      double total = 0.0;
      for (int t : v.item_votes()[i]) total += votes[t].value * y[t];
      for (int t : v.item_votes()[i]) x[t] = total - votes[t].value * y[t];
    }
    if (k == k_max) break;  // the estimate consumes this x-round's y
    for (int j = 0; j < v.worker_count(); ++j) {
      double total = 0.0;
      for (int t : v.worker_votes()[j]) total += votes[t].value * x[t];
      for (int t : v.worker_votes()[j]) y[t] = total - votes[t].value * x[t];
    }
  }

  res.labels.resize(v.item_count());
  for (int i = 0; i < v.item_count(); ++i) {
    double stat = 0.0;
    for (int t : v.item_votes()[i]) stat += votes[t].value * y[t];
    res.labels[i] = stat >= 0.0 ? 1 : -1;
  }
  return res;
}

std::vector<int> kos(const VoteMatrix& v, int k_max, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> init_y(v.votes().size());
  for (double& m : init_y) m = rng.normal(1.0, 1.0);
  return kos_run(v, k_max, init_y).labels;
}

EmBooleanResult em_boolean(const VoteMatrix& v, double alpha, double beta,
                           int iters) {
  v.validate();
  if (iters < 1) throw ValidationError("em_boolean: iters must be >= 1");
  // MAP update needs an interior Beta mode.
  if (!(alpha >= 1.0) || !(beta >= 1.0)) {
    throw ValidationError("em_boolean: prior shapes must be >= 1");
  }
  const auto& votes = v.votes();

  EmBooleanResult res;
  res.posterior_plus.assign(v.item_count(), 0.5);
  res.reliabilities.assign(v.worker_count(), 0.5);
  auto& q = res.posterior_plus;
  auto& p = res.reliabilities;

  for (int it = 0; it < iters; ++it) {
    // M-step: MAP reliability under Beta(alpha, beta) given the soft
    // agreement of each worker's votes with the current posteriors.
    for (int j = 0; j < v.worker_count(); ++j) {
      const auto& tw = v.worker_votes()[j];
      if (tw.empty()) {
        p[j] = 0.5;  // never observed; stays uninformed
        continue;
      }
      double agree = 0.0;
      for (int t : tw) {
        agree += votes[t].value == 1 ? q[votes[t].item]
                                     : 1.0 - q[votes[t].item];
      }
      p[j] = (alpha - 1.0 + agree) /
             (alpha + beta - 2.0 + static_cast<double>(tw.size()));
      // The exact value lives in (0, 1) but saturated posteriors can round
      // it to 0 or 1, which would blow up the next E-step's logs.
      p[j] = std::min(1.0 - 1e-9, std::max(1e-9, p[j]));
    }
    // E-step: posterior of each item under a uniform class prior.
    for (int i = 0; i < v.item_count(); ++i) {
      double log_plus = 0.0, log_minus = 0.0;
      for (int t : v.item_votes()[i]) {
        double pj = p[votes[t].worker];
        if (votes[t].value == 1) {
          log_plus += std::log(pj);
          log_minus += std::log(1.0 - pj);
        } else {
          log_plus += std::log(1.0 - pj);
          log_minus += std::log(pj);
        }
      }
      q[i] = 1.0 / (1.0 + std::exp(log_minus - log_plus));
    }
  }

  res.labels.resize(v.item_count());
  for (int i = 0; i < v.item_count(); ++i) {
    res.labels[i] = q[i] >= 0.5 ? 1 : -1;
  }
  return res;
}

namespace {

int round_half_up_clamped(double value, double max_grade) {
  double r = std::floor(value + 0.5);
  if (r < 0.0) r = 0.0;
  if (r > max_grade) r = max_grade;
  return static_cast<int>(r);
}

}  // namespace

std::vector<int> average_grade(const GradeMatrix& g) {
  std::vector<int> out(g.item_count());
  for (int i = 0; i < g.item_count(); ++i) {
    const auto& ti = g.item_grades()[i];
    if (ti.empty()) {
      throw ValidationError("average_grade: item " + std::to_string(i) +
                            " has no grades");
    }
    double sum = 0.0;
    for (int t : ti) sum += g.grades()[t].grade;
    out[i] = round_half_up_clamped(sum / static_cast<double>(ti.size()),
                                   g.max_grade());
  }
  return out;
}

EmGradesResult em_grades(const GradeMatrix& g, int iters, double var_floor) {
  if (iters < 1) throw ValidationError("em_grades: iters must be >= 1");
  if (!(var_floor > 0.0)) {
    throw ValidationError("em_grades: var_floor must be > 0");
  }
  EmGradesResult res;
  res.estimates.assign(g.item_count(), 0.0);
  res.worker_variance.assign(g.worker_count(), var_floor);

  for (int i = 0; i < g.item_count(); ++i) {
    const auto& ti = g.item_grades()[i];
    if (ti.empty()) {
      throw ValidationError("em_grades: item " + std::to_string(i) +
                            " has no grades");
    }
    double sum = 0.0;
    for (int t : ti) sum += g.grades()[t].grade;
    res.estimates[i] = sum / static_cast<double>(ti.size());
  }

  for (int it = 0; it < iters; ++it) {
    for (int j = 0; j < g.worker_count(); ++j) {
      const auto& tw = g.worker_grades()[j];
      if (tw.empty()) {
        res.worker_variance[j] = var_floor;
        continue;
      }
      double ss = 0.0;
      for (int t : tw) {
        double d = g.grades()[t].grade - res.estimates[g.grades()[t].item];
        ss += d * d;
      }
      res.worker_variance[j] =
          std::max(var_floor, ss / static_cast<double>(tw.size()));
    }
    for (int i = 0; i < g.item_count(); ++i) {
      double num = 0.0, den = 0.0;
      for (int t : g.item_grades()[i]) {
        double w = 1.0 / res.worker_variance[g.grades()[t].worker];
        num += w * g.grades()[t].grade;
        den += w;
      }
      res.estimates[i] = num / den;
    }
  }

  res.rounded.resize(g.item_count());
  for (int i = 0; i < g.item_count(); ++i) {
    res.rounded[i] = round_half_up_clamped(res.estimates[i], g.max_grade());
  }
  return res;
}

std::vector<int> proportional_guess(const std::vector<int>& train_labels,
                                    std::size_t test_size,
                                    std::uint64_t seed) {
  if (train_labels.empty()) {
    throw ValidationError("proportional_guess: empty training labels");
  }
  // Empirical distribution in ascending label order.
  std::map<int, std::size_t> hist;
  for (int l : train_labels) hist[l]++;
  std::vector<int> values;
  std::vector<double> cum;
  double acc = 0.0;
  for (auto& [label, count] : hist) {
    values.push_back(label);
    acc += static_cast<double>(count) /
           static_cast<double>(train_labels.size());
    cum.push_back(acc);
  }
  cum.back() = 1.0;

  RngStream rng(seed);
  std::vector<int> out;
  out.reserve(test_size);
  for (std::size_t i = 0; i < test_size; ++i) {
    double u = rng.uniform01();
    std::size_t k = 0;
    while (u >= cum[k]) ++k;
    out.push_back(values[k]);
  }
  return out;
}

}  // namespace mlsl
