#pragma once

#include <string>
#include <vector>

#include "mlsl/common.hpp"

namespace mlsl {

// Rows = true class, columns = predicted class.
struct ConfusionMatrix {
  int class_count = 0;
  std::vector<long> counts;  // row-major, class_count^2

  long& at(int truth, int pred) { return counts[truth * class_count + pred]; }
  long at(int truth, int pred) const {
    return counts[truth * class_count + pred];
  }
  long total() const;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& truth,
                                 const std::vector<int>& pred,
                                 int class_count);

// Fraction of positions where pred matches truth.
double accuracy(const std::vector<int>& truth, const std::vector<int>& pred);

// Unweighted mean of per-class recall; classes absent from truth are
// excluded from the mean (they have no recall to measure).
double average_recall(const std::vector<int>& truth,
                      const std::vector<int>& pred, int class_count);

// Per class 2PR/(P+R), 0 whenever P+R = 0.
std::vector<double> f1_per_class(const std::vector<int>& truth,
                                 const std::vector<int>& pred,
                                 int class_count);

// The CSV block shared by the eval and baseline commands: one
// "metric,value" row per measure, then the confusion matrix cells.
std::string metrics_csv(const std::vector<int>& truth,
                        const std::vector<int>& pred, int class_count);

}  // namespace mlsl
