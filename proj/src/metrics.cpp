#include "mlsl/metrics.hpp"

#include <cstdio>
#include <numeric>

namespace mlsl {

namespace {

void check_inputs(const std::vector<int>& truth, const std::vector<int>& pred,
                  int class_count) {
  if (truth.empty()) throw ValidationError("metrics: empty input");
  if (truth.size() != pred.size()) {
    throw ValidationError("metrics: truth/pred length mismatch");
  }
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= class_count || pred[i] < 0 ||
        pred[i] >= class_count) {
      throw ValidationError("metrics: class index out of range");
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

long ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0L);
}

ConfusionMatrix confusion_matrix(const std::vector<int>& truth,
                                 const std::vector<int>& pred,
                                 int class_count) {
  check_inputs(truth, pred, class_count);
  ConfusionMatrix cm;
  cm.class_count = class_count;
  cm.counts.assign(static_cast<std::size_t>(class_count) * class_count, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.at(truth[i], pred[i])++;
  return cm;
}

double accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (truth.empty()) throw ValidationError("accuracy: empty input");
  if (truth.size() != pred.size()) {
    throw ValidationError("accuracy: truth/pred length mismatch");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == pred[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double average_recall(const std::vector<int>& truth,
                      const std::vector<int>& pred, int class_count) {
  ConfusionMatrix cm = confusion_matrix(truth, pred, class_count);
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < class_count; ++c) {
    long support = 0;
    for (int p = 0; p < class_count; ++p) support += cm.at(c, p);
    if (support == 0) continue;
    sum += static_cast<double>(cm.at(c, c)) / static_cast<double>(support);
    ++present;
  }
  if (present == 0) throw ValidationError("average_recall: no class present");
  return sum / present;
}

std::vector<double> f1_per_class(const std::vector<int>& truth,
                                 const std::vector<int>& pred,
                                 int class_count) {
  ConfusionMatrix cm = confusion_matrix(truth, pred, class_count);
  std::vector<double> f1(class_count, 0.0);
  for (int c = 0; c < class_count; ++c) {
    long tp = cm.at(c, c);
    long support = 0, predicted = 0;
    for (int k = 0; k < class_count; ++k) {
      support += cm.at(c, k);
      predicted += cm.at(k, c);
    }
    double precision = predicted > 0 ? static_cast<double>(tp) / predicted
                                     : 0.0;
    double recall = support > 0 ? static_cast<double>(tp) / support : 0.0;
    f1[c] = precision + recall > 0.0
                ? 2.0 * precision * recall / (precision + recall)
                : 0.0;
  }
  return f1;
}

std::string metrics_csv(const std::vector<int>& truth,
                        const std::vector<int>& pred, int class_count) {
  ConfusionMatrix cm = confusion_matrix(truth, pred, class_count);
  std::vector<double> f1 = f1_per_class(truth, pred, class_count);
  std::string out = "metric,value\n";
  out += "n_samples," + std::to_string(truth.size()) + "\n";
  out += "accuracy," + format_double(accuracy(truth, pred)) + "\n";
  out += "average_recall," +
         format_double(average_recall(truth, pred, class_count)) + "\n";
  for (int c = 0; c < class_count; ++c) {
    out += "f1_class_" + std::to_string(c) + "," + format_double(f1[c]) +
           "\n";
  }
  for (int r = 0; r < class_count; ++r) {
    for (int c = 0; c < class_count; ++c) {
      out += "confusion_" + std::to_string(r) + "_" + std::to_string(c) +
             "," + std::to_string(cm.at(r, c)) + "\n";
    }
  }
  return out;
}

}  // namespace mlsl
