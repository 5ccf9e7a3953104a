#include "mlsl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mlsl {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError(context + ": not a number: '" + s + "'");
  }
  if (pos != s.size()) {
    throw ValidationError(context + ": trailing characters in '" + s + "'");
  }
  if (!std::isfinite(v)) {
    throw ValidationError(context + ": non-finite value '" + s + "'");
  }
  return v;
}

long parse_long(const std::string& s, const std::string& context) {
  std::size_t pos = 0;
  long v;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError(context + ": not an integer: '" + s + "'");
  }
  if (pos != s.size()) {
    throw ValidationError(context + ": trailing characters in '" + s + "'");
  }
  return v;
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  return in;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // keep '\n' on every platform
  if (!out) throw ValidationError("cannot write file: " + path);
  return out;
}

}  // namespace

Graph load_graph(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(path + ": empty file");
  }
  auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "src" || header[1] != "dst") {
    throw ValidationError(path + ": expected header src,dst,f1,...");
  }
  const int width = static_cast<int>(header.size()) - 2;
  Graph g(width);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size()) +
                            " columns, found " +
                            std::to_string(fields.size()));
    }
    Vec features(width);
    for (int f = 0; f < width; ++f) {
      features[f] = parse_double(fields[f + 2],
                                 path + ":" + std::to_string(line_no));
    }
    g.add_edge(fields[0], fields[1], std::move(features));
  }
  return g;
}

void save_graph(const Graph& g, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "src,dst";
  for (int f = 1; f <= g.feature_width(); ++f) out << ",f" << f;
  out << "\n";
  for (const Edge& e : g.edges()) {
    out << g.node_id(e.src) << "," << g.node_id(e.dst);
    for (int f = 0; f < g.feature_width(); ++f) out << "," << fmt(e.features[f]);
    out << "\n";
  }
}

std::vector<std::pair<std::string, int>> load_labels(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) || split_csv(line) !=
      std::vector<std::string>{"node", "label"}) {
    throw ValidationError(path + ": expected header node,label");
  }
  std::vector<std::pair<std::string, int>> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 2) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected 2 columns");
    }
    long label = parse_long(fields[1], path + ":" + std::to_string(line_no));
    if (label < 0) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": labels must be non-negative");
    }
    labels.emplace_back(fields[0], static_cast<int>(label));
  }
  return labels;
}

void save_labels(const std::vector<std::pair<std::string, int>>& labels,
                 const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "node,label\n";
  for (const auto& [node, label] : labels) {
    out << node << "," << label << "\n";
  }
}

namespace {

constexpr const char* kModelMagic = "mlsl-model";
constexpr int kModelVersion = 1;

void write_tensors(std::ofstream& out, const LstmTensors& t) {
  static const char* gate_names[] = {"input", "forget", "output",
                                     "candidate"};
  auto write_mat = [&](const char* what, int gate, const Mat& m) {
    out << what << " " << gate_names[gate] << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << (c ? " " : "") << fmt(m(r, c));
      }
      out << "\n";
    }
  };
  for (int g = 0; g < kNumGates; ++g) write_mat("w_in", g, t.w_in[g]);
  for (int g = 0; g < kNumGates; ++g) write_mat("w_rec", g, t.w_rec[g]);
  for (int g = 0; g < kNumGates; ++g) {
    out << "bias " << gate_names[g] << "\n";
    for (Eigen::Index i = 0; i < t.bias[g].size(); ++i) {
      out << (i ? " " : "") << fmt(t.bias[g][i]);
    }
    out << "\n";
  }
}

}  // namespace

void save_model(const MlslModel& m, const std::string& path) {
  m.validate();
  std::ofstream out = open_for_write(path);
  out << kModelMagic << " v" << kModelVersion << "\n";
  out << "depth " << m.depth() << "\n";
  out << "feature_width " << m.feature_width << "\n";
  out << "level_sizes";
  for (int k : m.level_sizes) out << " " << k;
  out << "\n";
  out << "output_mode "
      << (m.output_mode == OutputMode::kClassification ? "classification"
                                                       : "regression")
      << "\n";
  for (int level = 1; level <= m.depth(); ++level) {
    const LstmParams& p = m.learners[level - 1];
    out << "level " << level << " input_width " << p.shape.input_width
        << " output_width " << p.shape.output_width << "\n";
    write_tensors(out, p.weights);
  }
}

namespace {

// Whitespace-token reader with parse-error context.
class TokenReader {
 public:
  explicit TokenReader(const std::string& path)
      : path_(path), in_(open_for_read(path)) {}

  std::string next() {
    std::string tok;
    if (!(in_ >> tok)) {
      throw ValidationError(path_ + ": truncated model file");
    }
    return tok;
  }

  void expect(const std::string& want) {
    std::string got = next();
    if (got != want) {
      throw ValidationError(path_ + ": expected '" + want + "', found '" +
                            got + "'");
    }
  }

  long next_long() { return parse_long(next(), path_); }
  double next_double() { return parse_double(next(), path_); }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace

MlslModel load_model(const std::string& path) {
  TokenReader r(path);
  r.expect(kModelMagic);
  std::string version = r.next();
  if (version != "v" + std::to_string(kModelVersion)) {
    throw ValidationError(path + ": unsupported model version '" + version +
                          "'");
  }
  r.expect("depth");
  long depth = r.next_long();
  if (depth < 1 || depth > 64) {
    throw ValidationError(path + ": bad depth");
  }
  MlslModel m;
  r.expect("feature_width");
  m.feature_width = static_cast<int>(r.next_long());
  r.expect("level_sizes");
  for (long i = 0; i < depth; ++i) {
    long k = r.next_long();
    if (k < 1) throw ValidationError(path + ": bad level size");
    m.level_sizes.push_back(static_cast<int>(k));
  }
  r.expect("output_mode");
  std::string mode = r.next();
  if (mode == "classification") {
    m.output_mode = OutputMode::kClassification;
  } else if (mode == "regression") {
    m.output_mode = OutputMode::kRegression;
  } else {
    throw ValidationError(path + ": unknown output mode '" + mode + "'");
  }

  static const char* gate_names[] = {"input", "forget", "output",
                                     "candidate"};
  for (long level = 1; level <= depth; ++level) {
    r.expect("level");
    if (r.next_long() != level) {
      throw ValidationError(path + ": levels out of order");
    }
    r.expect("input_width");
    int n = static_cast<int>(r.next_long());
    r.expect("output_width");
    int k = static_cast<int>(r.next_long());
    LstmParams p{LearnerShape{n, k}, LstmTensors::zeros({n, k})};
    auto read_mat = [&](const char* what, int gate, Mat& mat) {
      r.expect(what);
      r.expect(gate_names[gate]);
      for (Eigen::Index row = 0; row < mat.rows(); ++row)
        for (Eigen::Index col = 0; col < mat.cols(); ++col)
          mat(row, col) = r.next_double();
    };
    for (int g = 0; g < kNumGates; ++g) read_mat("w_in", g, p.weights.w_in[g]);
    for (int g = 0; g < kNumGates; ++g) {
      read_mat("w_rec", g, p.weights.w_rec[g]);
    }
    for (int g = 0; g < kNumGates; ++g) {
      r.expect("bias");
      r.expect(gate_names[g]);
      for (Eigen::Index i = 0; i < p.weights.bias[g].size(); ++i) {
        p.weights.bias[g][i] = r.next_double();
      }
    }
    m.learners.push_back(std::move(p));
  }
  m.validate();  // dimension mismatches surface here
  return m;
}

double compute_quality(double d01, double d02, double d12, bool* clamped) {
  if (clamped) *clamped = false;
  if (d01 < 0.0 || d02 < 0.0 || d12 < 0.0) {
    throw ValidationError("compute_quality: distances must be non-negative");
  }
  if (d01 == 0.0) return 0.0;
  double denom = d02 - d12;
  if (std::abs(denom) < 1e-9) return 0.0;
  double q = d01 / denom;
  if (q > 1.0) {
    if (clamped) *clamped = true;
    return 1.0;
  }
  if (q < -1.0) {
    if (clamped) *clamped = true;
    return -1.0;
  }
  return q;
}

Graph standardize_features(const Graph& g) {
  const int width = g.feature_width();
  const double n = static_cast<double>(g.edge_count());
  if (width == 0 || g.edge_count() == 0) return g;
  Vec mean = Vec::Zero(width), sq = Vec::Zero(width);
  for (const Edge& e : g.edges()) {
    mean += e.features;
    sq.array() += e.features.array().square();
  }
  mean /= n;
  Vec var = (sq.array() / n - mean.array().square()).max(0.0).matrix();
  Vec scale(width);
  for (int f = 0; f < width; ++f) {
    scale[f] = var[f] > 1e-24 ? 1.0 / std::sqrt(var[f]) : 0.0;
  }
  Graph out(width);
  for (int v = 0; v < g.node_count(); ++v) out.add_node(g.node_id(v));
  for (const Edge& e : g.edges()) {
    Vec f = ((e.features - mean).array() * scale.array()).matrix();
    out.add_edge(e.src, e.dst, std::move(f));
  }
  return out;
}

}  // namespace mlsl
