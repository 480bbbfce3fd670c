#include "ltr/model_io.hpp"

#include <fstream>
#include <sstream>

#include "ltr/error.hpp"
#include "ltr/letor_io.hpp"

namespace ltr {

namespace {

constexpr const char* kMagic = "ltrlab-model";
constexpr int kVersion = 1;

void write_preorder(std::ostream& out, const std::vector<TreeNode>& nodes,
                    int idx) {
  const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) {
    out << "leaf " << format_real(n.value) << '\n';
    return;
  }
  out << "split " << n.feature << ' ' << format_real(n.threshold) << '\n';
  write_preorder(out, nodes, n.left);
  write_preorder(out, nodes, n.right);
}

int count_nodes(const RegressionTree& tree) {
  return static_cast<int>(tree.nodes().size());
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return line;
    }
    throw ParseError(std::string("unexpected end of model file, wanted ") + what,
                     line_no_);
  }

  int line_no() const { return line_no_; }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

[[noreturn]] void bad(const LineReader& r, const std::string& msg) {
  throw ParseError(msg, r.line_no());
}

double to_real(const LineReader& r, const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad(r, "bad real: " + s);
  }
}

long long to_int(const LineReader& r, const std::string& s) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    bad(r, "bad integer: " + s);
  }
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

// Rebuilds one subtree from consecutive pre-order lines, appending nodes in
// pre-order index order. Returns the subtree root's index.
int read_preorder(LineReader& r, std::vector<TreeNode>& nodes, int& remaining) {
  if (remaining <= 0) bad(r, "tree node count too small");
  --remaining;
  std::vector<std::string> f = fields(r.next("tree node"));
  int idx = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (f.size() == 2 && f[0] == "leaf") {
    nodes[static_cast<std::size_t>(idx)].value = to_real(r, f[1]);
  } else if (f.size() == 3 && f[0] == "split") {
    int feature = static_cast<int>(to_int(r, f[1]));
    if (feature < 1) bad(r, "split feature must be >= 1");
    double threshold = to_real(r, f[2]);
    int left = read_preorder(r, nodes, remaining);
    int right = read_preorder(r, nodes, remaining);
    TreeNode& n = nodes[static_cast<std::size_t>(idx)];
    n.feature = feature;
    n.threshold = threshold;
    n.left = left;
    n.right = right;
  } else {
    bad(r, "expected 'split <fid> <thr>' or 'leaf <value>'");
  }
  return idx;
}

std::vector<double> read_reals(LineReader& r, const char* tag,
                               std::size_t count) {
  std::vector<std::string> f = fields(r.next(tag));
  if (f.size() != count + 1 || f[0] != tag)
    bad(r, std::string("expected '") + tag + "' with " + std::to_string(count) +
               " values");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = to_real(r, f[i + 1]);
  return out;
}

void write_reals(std::ostream& out, const char* tag,
                 const std::vector<double>& v) {
  out << tag;
  for (double x : v) out << ' ' << format_real(x);
  out << '\n';
}

}  // namespace

ScoreFn SavedModel::scorer() const {
  switch (kind) {
    case ModelKind::tree_ensemble:
      return [m = ensemble](const FeatureVector& fv) { return m.predict(fv); };
    case ModelKind::linear:
      return [m = linear](const FeatureVector& fv) { return m.score(fv); };
    case ModelKind::ranknet:
      return [m = ranknet](const FeatureVector& fv) { return m.score(fv); };
  }
  throw DataError("corrupt model kind");
}

void SavedModel::verify_registry(const FeatureRegistry& registry) const {
  if (registry.fingerprint() != registry_fingerprint) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016llx vs %016llx",
                  static_cast<unsigned long long>(registry_fingerprint),
                  static_cast<unsigned long long>(registry.fingerprint()));
    throw DataError(std::string("model was trained against a different feature "
                                "registry (") +
                    buf + ")");
  }
}

void save_model(const SavedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot create " + path.string());
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx",
                static_cast<unsigned long long>(model.registry_fingerprint));
  out << kMagic << ' ' << kVersion << '\n';
  out << "algo " << model.algo << '\n';
  out << "objective " << model.objective << '\n';
  out << "registry " << fp << '\n';
  std::string cfg = model.config.canonical();
  out << "config " << std::count(cfg.begin(), cfg.end(), '\n') << '\n' << cfg;
  switch (model.kind) {
    case ModelKind::tree_ensemble: {
      const TreeEnsemble& e = model.ensemble;
      out << "ensemble "
          << (e.mode == TreeEnsemble::Mode::boosted ? "boosted" : "bagged")
          << ' ' << format_real(e.learning_rate) << ' ' << e.trees.size()
          << '\n';
      for (const RegressionTree& t : e.trees) {
        out << "tree " << count_nodes(t) << '\n';
        if (!t.empty()) write_preorder(out, t.nodes(), 0);
      }
      break;
    }
    case ModelKind::linear: {
      const LinearModel& m = model.linear;
      out << "linear " << linear_variant_name(m.variant) << ' '
          << format_real(m.cost) << ' ' << format_real(m.bias) << ' '
          << m.weights.size() << '\n';
      write_reals(out, "weights", m.weights);
      break;
    }
    case ModelKind::ranknet: {
      const RankNetModel& m = model.ranknet;
      out << "ranknet " << m.input_dim << ' ' << m.hidden_dim << ' '
          << format_real(m.b2) << '\n';
      for (int h = 0; h < m.hidden_dim; ++h) {
        std::vector<double> row(
            m.w1.begin() + static_cast<std::ptrdiff_t>(h) * m.input_dim,
            m.w1.begin() + static_cast<std::ptrdiff_t>(h + 1) * m.input_dim);
        write_reals(out, "w1", row);
      }
      write_reals(out, "b1", m.b1);
      write_reals(out, "w2", m.w2);
      break;
    }
  }
  out << "end\n";
  if (!out) throw DataError("write failed for " + path.string());
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  LineReader r(in);

  std::vector<std::string> head = fields(r.next("header"));
  if (head.size() != 2 || head[0] != kMagic)
    bad(r, "not a model file (bad magic)");
  if (to_int(r, head[1]) != kVersion)
    bad(r, "unsupported model version " + head[1]);

  SavedModel model;
  std::vector<std::string> f = fields(r.next("algo"));
  if (f.size() != 2 || f[0] != "algo") bad(r, "expected 'algo <name>'");
  model.algo = f[1];
  f = fields(r.next("objective"));
  if (f.size() != 2 || f[0] != "objective") bad(r, "expected 'objective <name>'");
  model.objective = f[1];
  f = fields(r.next("registry"));
  if (f.size() != 2 || f[0] != "registry" || f[1].size() != 16)
    bad(r, "expected 'registry <16 hex digits>'");
  model.registry_fingerprint = std::stoull(f[1], nullptr, 16);
  f = fields(r.next("config"));
  if (f.size() != 2 || f[0] != "config") bad(r, "expected 'config <count>'");
  long long cfg_lines = to_int(r, f[1]);
  std::string cfg_text;
  for (long long i = 0; i < cfg_lines; ++i) cfg_text += r.next("config line") + "\n";
  model.config = KeyValueConfig::parse_string(cfg_text);

  std::vector<std::string> payload = fields(r.next("model payload"));
  if (payload.empty()) bad(r, "missing payload");
  if (payload[0] == "ensemble") {
    if (payload.size() != 4) bad(r, "expected 'ensemble <mode> <lr> <trees>'");
    model.kind = ModelKind::tree_ensemble;
    if (payload[1] == "boosted")
      model.ensemble.mode = TreeEnsemble::Mode::boosted;
    else if (payload[1] == "bagged")
      model.ensemble.mode = TreeEnsemble::Mode::bagged;
    else
      bad(r, "unknown ensemble mode " + payload[1]);
    model.ensemble.learning_rate = to_real(r, payload[2]);
    long long n_trees = to_int(r, payload[3]);
    if (n_trees < 0) bad(r, "negative tree count");
    model.ensemble.trees.reserve(static_cast<std::size_t>(n_trees));
    for (long long t = 0; t < n_trees; ++t) {
      f = fields(r.next("tree"));
      if (f.size() != 2 || f[0] != "tree") bad(r, "expected 'tree <nodes>'");
      int remaining = static_cast<int>(to_int(r, f[1]));
      std::vector<TreeNode> nodes;
      if (remaining > 0) {
        nodes.reserve(static_cast<std::size_t>(remaining));
        read_preorder(r, nodes, remaining);
        if (remaining != 0) bad(r, "tree node count too large");
      }
      model.ensemble.trees.emplace_back(std::move(nodes));
    }
  } else if (payload[0] == "linear") {
    if (payload.size() != 5)
      bad(r, "expected 'linear <variant> <cost> <bias> <dim>'");
    model.kind = ModelKind::linear;
    model.linear.variant = linear_variant_from_name(payload[1]);
    model.linear.cost = to_real(r, payload[2]);
    model.linear.bias = to_real(r, payload[3]);
    long long dim = to_int(r, payload[4]);
    if (dim < 0) bad(r, "negative weight count");
    model.linear.weights =
        read_reals(r, "weights", static_cast<std::size_t>(dim));
  } else if (payload[0] == "ranknet") {
    if (payload.size() != 4)
      bad(r, "expected 'ranknet <input_dim> <hidden_dim> <b2>'");
    model.kind = ModelKind::ranknet;
    model.ranknet.input_dim = static_cast<int>(to_int(r, payload[1]));
    model.ranknet.hidden_dim = static_cast<int>(to_int(r, payload[2]));
    if (model.ranknet.input_dim < 1 || model.ranknet.hidden_dim < 1)
      bad(r, "ranknet dimensions must be >= 1");
    model.ranknet.b2 = to_real(r, payload[3]);
    for (int h = 0; h < model.ranknet.hidden_dim; ++h) {
      std::vector<double> row =
          read_reals(r, "w1", static_cast<std::size_t>(model.ranknet.input_dim));
      model.ranknet.w1.insert(model.ranknet.w1.end(), row.begin(), row.end());
    }
    model.ranknet.b1 =
        read_reals(r, "b1", static_cast<std::size_t>(model.ranknet.hidden_dim));
    model.ranknet.w2 =
        read_reals(r, "w2", static_cast<std::size_t>(model.ranknet.hidden_dim));
  } else {
    bad(r, "unknown payload kind " + payload[0]);
  }
  if (fields(r.next("end"))[0] != "end") bad(r, "missing end marker");
  return model;
}

}  // namespace ltr
