#include "ltr/ranknet.hpp"

#include <algorithm>
#include <cmath>

#include "ltr/error.hpp"
#include "ltr/rng.hpp"

namespace ltr {

namespace {

double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                  : std::exp(x) / (1.0 + std::exp(x));
}

// Forward pass keeping hidden activations for backprop.
double forward(const RankNetModel& m, const double* x, std::vector<double>& h) {
  h.resize(static_cast<std::size_t>(m.hidden_dim));
  double s = m.b2;
  for (int k = 0; k < m.hidden_dim; ++k) {
    const double* row = m.w1.data() + static_cast<std::size_t>(k) * m.input_dim;
    double a = m.b1[static_cast<std::size_t>(k)];
    for (int j = 0; j < m.input_dim; ++j) a += row[j] * x[j];
    double hk = sigmoid(a);
    h[static_cast<std::size_t>(k)] = hk;
    s += m.w2[static_cast<std::size_t>(k)] * hk;
  }
  return s;
}

// Adds g * d score(x) / d theta into the accumulator gradient.
void accumulate_score_gradient(const RankNetModel& m, const double* x,
                               const std::vector<double>& h, double g,
                               RankNetGradient& acc) {
  for (int k = 0; k < m.hidden_dim; ++k) {
    double hk = h[static_cast<std::size_t>(k)];
    acc.w2[static_cast<std::size_t>(k)] += g * hk;
    double ga = g * m.w2[static_cast<std::size_t>(k)] * hk * (1.0 - hk);
    acc.b1[static_cast<std::size_t>(k)] += ga;
    double* row = acc.w1.data() + static_cast<std::size_t>(k) * m.input_dim;
    for (int j = 0; j < m.input_dim; ++j) row[j] += ga * x[j];
  }
  acc.b2 += g;
}

void check_dim(const RankNetModel& m, const FeatureVector& fv) {
  if (fv.size() != m.input_dim)
    throw DataError("feature vector length does not match ranknet model");
}

}  // namespace

double RankNetModel::score(const FeatureVector& fv) const {
  check_dim(*this, fv);
  std::vector<double> h;
  return forward(*this, fv.values.data(), h);
}

RankNetConfig RankNetConfig::from_config(const KeyValueConfig& cfg) {
  RankNetConfig c;
  c.hidden = static_cast<int>(cfg.get_int("ranknet.hidden", c.hidden));
  c.epochs = static_cast<int>(cfg.get_int("ranknet.epochs", c.epochs));
  c.pairs_per_epoch =
      static_cast<int>(cfg.get_int("ranknet.pairs-per-epoch", c.pairs_per_epoch));
  c.learning_rate = cfg.get_double("ranknet.learning-rate", c.learning_rate);
  c.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  c.validate();
  return c;
}

void RankNetConfig::validate() const {
  if (hidden < 1) throw ConfigError("ranknet.hidden must be >= 1");
  if (epochs < 1) throw ConfigError("ranknet.epochs must be >= 1");
  if (pairs_per_epoch < 1) throw ConfigError("ranknet.pairs-per-epoch must be >= 1");
  if (learning_rate <= 0.0) throw ConfigError("ranknet.learning-rate must be > 0");
}

double ranknet_pair_loss(const RankNetModel& model, const FeatureVector& hi,
                         const FeatureVector& lo) {
  check_dim(model, hi);
  check_dim(model, lo);
  std::vector<double> h;
  double delta = forward(model, hi.values.data(), h) -
                 forward(model, lo.values.data(), h);
  return delta > 0.0 ? std::log1p(std::exp(-delta))
                     : -delta + std::log1p(std::exp(delta));
}

RankNetGradient ranknet_pair_gradient(const RankNetModel& model,
                                      const FeatureVector& hi,
                                      const FeatureVector& lo) {
  check_dim(model, hi);
  check_dim(model, lo);
  RankNetGradient g;
  g.w1.assign(model.w1.size(), 0.0);
  g.b1.assign(model.b1.size(), 0.0);
  g.w2.assign(model.w2.size(), 0.0);
  std::vector<double> h_hi, h_lo;
  double delta = forward(model, hi.values.data(), h_hi) -
                 forward(model, lo.values.data(), h_lo);
  // d/d delta of log(1 + exp(-delta))
  double dl = -sigmoid(-delta);
  accumulate_score_gradient(model, hi.values.data(), h_hi, dl, g);
  accumulate_score_gradient(model, lo.values.data(), h_lo, -dl, g);
  return g;
}

RankNetModel train_ranknet(const DatasetView& view, Objective objective,
                           const RankNetConfig& config) {
  config.validate();
  std::vector<const FeatureVector*> rows;
  std::vector<int> grades;
  // All within-query pairs (preferred, other) with strictly greater grade.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t gi = 0; gi < view.group_count(); ++gi) {
    const QueryGroup& g = view.group(gi);
    std::size_t base = rows.size();
    for (const RankingInstance& inst : g.instances) {
      if (!inst.labels.has(objective))
        throw DataError("missing " + std::string(objective_name(objective)) +
                        " label for doc " + inst.doc_id);
      rows.push_back(&inst.features);
      grades.push_back(inst.labels.grade(objective));
    }
    for (std::size_t i = base; i < rows.size(); ++i)
      for (std::size_t j = base; j < rows.size(); ++j)
        if (grades[i] > grades[j])
          pairs.emplace_back(static_cast<std::uint32_t>(i),
                             static_cast<std::uint32_t>(j));
  }
  if (rows.empty()) throw DataError("empty training view");
  if (pairs.empty())
    throw DataError("ranknet needs at least one unequal-grade pair");

  const std::size_t n = rows.size();
  const int d = view.registry().feature_count();

  std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
  std::vector<double> inv_sd(static_cast<std::size_t>(d), 1.0);
  for (const FeatureVector* fv : rows)
    for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] += fv->values[static_cast<std::size_t>(j)];
  for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] /= static_cast<double>(n);
  {
    std::vector<double> var(static_cast<std::size_t>(d), 0.0);
    for (const FeatureVector* fv : rows)
      for (int j = 0; j < d; ++j) {
        double c = fv->values[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)];
        var[static_cast<std::size_t>(j)] += c * c;
      }
    for (int j = 0; j < d; ++j) {
      double sd = std::sqrt(var[static_cast<std::size_t>(j)] / static_cast<double>(n));
      if (sd > 0.0) inv_sd[static_cast<std::size_t>(j)] = 1.0 / sd;
    }
  }

  RankNetModel m;
  m.input_dim = d;
  m.hidden_dim = config.hidden;
  m.w1.resize(static_cast<std::size_t>(config.hidden) * d);
  m.b1.assign(static_cast<std::size_t>(config.hidden), 0.0);
  m.w2.resize(static_cast<std::size_t>(config.hidden));
  Rng rng(derive_seed(config.seed, "ranknet"));
  double scale1 = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& v : m.w1) v = rng.uniform(-scale1, scale1);
  double scale2 = 1.0 / std::sqrt(static_cast<double>(config.hidden));
  for (double& v : m.w2) v = rng.uniform(-scale2, scale2);

  std::vector<double> z_hi(static_cast<std::size_t>(d));
  std::vector<double> z_lo(static_cast<std::size_t>(d));
  std::vector<double> h_hi, h_lo;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double eta = config.learning_rate / (1.0 + epoch);
    for (int step = 0; step < config.pairs_per_epoch; ++step) {
      auto [hi, lo] = pairs[rng.uniform_int(pairs.size())];
      const std::vector<double>& x_hi = rows[hi]->values;
      const std::vector<double>& x_lo = rows[lo]->values;
      for (int j = 0; j < d; ++j) {
        z_hi[static_cast<std::size_t>(j)] =
            (x_hi[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)]) * inv_sd[static_cast<std::size_t>(j)];
        z_lo[static_cast<std::size_t>(j)] =
            (x_lo[static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)]) * inv_sd[static_cast<std::size_t>(j)];
      }
      double delta = forward(m, z_hi.data(), h_hi) - forward(m, z_lo.data(), h_lo);
      double dl = -sigmoid(-delta);
      // In-place SGD step: theta -= eta * dl * (d s_hi - d s_lo) / d theta.
      for (int k = 0; k < config.hidden; ++k) {
        double hk_hi = h_hi[static_cast<std::size_t>(k)];
        double hk_lo = h_lo[static_cast<std::size_t>(k)];
        double w2k = m.w2[static_cast<std::size_t>(k)];
        double ga_hi = dl * w2k * hk_hi * (1.0 - hk_hi);
        double ga_lo = -dl * w2k * hk_lo * (1.0 - hk_lo);
        m.w2[static_cast<std::size_t>(k)] -= eta * dl * (hk_hi - hk_lo);
        m.b1[static_cast<std::size_t>(k)] -= eta * (ga_hi + ga_lo);
        double* row = m.w1.data() + static_cast<std::size_t>(k) * d;
        for (int j = 0; j < d; ++j)
          row[j] -= eta * (ga_hi * z_hi[static_cast<std::size_t>(j)] +
                           ga_lo * z_lo[static_cast<std::size_t>(j)]);
      }
      // b2 cancels in delta, gradient is exactly 0; left untouched.
    }
  }

  // Fold standardization into the first layer so raw vectors score directly:
  //   W1 z + b1 = (W1 / sd) x + (b1 - W1 mean / sd).
  for (int k = 0; k < config.hidden; ++k) {
    double* row = m.w1.data() + static_cast<std::size_t>(k) * d;
    for (int j = 0; j < d; ++j) {
      double wz = row[j] * inv_sd[static_cast<std::size_t>(j)];
      m.b1[static_cast<std::size_t>(k)] -= wz * mean[static_cast<std::size_t>(j)];
      row[j] = wz;
    }
  }
  return m;
}

}  // namespace ltr
