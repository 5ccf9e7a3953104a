#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mlsl/graph.hpp"
#include "mlsl/model.hpp"

namespace mlsl {

// All formats are byte-exact: UTF-8, comma separators, '\n' line endings,
// '.' decimal point, doubles printed with 17 significant digits (lossless
// round trip).

// Edge list: header "src,dst,f1,...,fM", one row per edge. Edge order is
// preserved and defines the AsLoaded child order; M is inferred from the
// header.
Graph load_graph(const std::string& path);
void save_graph(const Graph& g, const std::string& path);

// Labels: header "node,label", class labels as non-negative integers.
std::vector<std::pair<std::string, int>> load_labels(const std::string& path);
void save_labels(const std::vector<std::pair<std::string, int>>& labels,
                 const std::string& path);

// Model file: text serialization (format version, depth, feature width,
// level sizes, output mode, then per-level row-major weight blocks).
void save_model(const MlslModel& m, const std::string& path);
MlslModel load_model(const std::string& path);

// Quality of an edit r1 as seen from the following revision r2, from the
// three pairwise edit distances d01 = d(r0,r1), d02 = d(r0,r2),
// d12 = d(r1,r2): q = d01 / (d02 - d12), clamped to [-1, 1]. A vanishing
// numerator or denominator yields 0; full revert gives -1, full keep +1.
// clamped, when given, reports whether the raw value was out of range.
double compute_quality(double d01, double d02, double d12,
                       bool* clamped = nullptr);

// In-place per-feature standardization to zero mean / unit variance;
// constant features become 0. Optional preprocessing for real datasets.
Graph standardize_features(const Graph& g);

}  // namespace mlsl
