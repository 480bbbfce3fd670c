#include "ltr/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ltr/error.hpp"
#include "ltr/rng.hpp"

namespace ltr {

namespace {

struct VariantRow {
  LinearVariant variant;
  const char* name;
  LinearLoss loss;
  Regularizer reg;
  bool classifier;
};

constexpr VariantRow kVariants[] = {
    {LinearVariant::l1_logistic, "l1lr", LinearLoss::logistic, Regularizer::l1, true},
    {LinearVariant::l2_logistic, "l2lr", LinearLoss::logistic, Regularizer::l2, true},
    {LinearVariant::l1_squared_hinge, "l1l2svmc", LinearLoss::squared_hinge,
     Regularizer::l1, true},
    {LinearVariant::l2_hinge, "l2l1svmc", LinearLoss::hinge, Regularizer::l2, true},
    {LinearVariant::l2_squared, "l2l2svmr", LinearLoss::squared, Regularizer::l2, false},
    {LinearVariant::l2_absolute, "l2l1svmr", LinearLoss::hinge, Regularizer::l2, false},
};

const VariantRow& row_of(LinearVariant v) {
  for (const VariantRow& r : kVariants)
    if (r.variant == v) return r;
  throw ConfigError("unknown linear variant");
}

// loss(s, t) for one instance. Classifier losses see the margin t*s;
// regressor losses see the residual s - t.
double instance_loss(const VariantRow& r, double s, double t) {
  if (r.classifier) {
    double m = t * s;
    switch (r.loss) {
      case LinearLoss::logistic:
        return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
      case LinearLoss::hinge:
        return std::max(0.0, 1.0 - m);
      case LinearLoss::squared_hinge: {
        double h = std::max(0.0, 1.0 - m);
        return h * h;
      }
      case LinearLoss::squared:
        break;
    }
    throw ConfigError("loss not valid for a classifier");
  }
  double res = s - t;
  if (r.loss == LinearLoss::squared) return res * res;
  if (r.loss == LinearLoss::hinge) return std::abs(res);
  throw ConfigError("loss not valid for a regressor");
}

// d loss / d s. Subgradient 0 at the kinks.
double instance_dloss(const VariantRow& r, double s, double t) {
  if (r.classifier) {
    double m = t * s;
    switch (r.loss) {
      case LinearLoss::logistic:
        return -t / (1.0 + std::exp(m));
      case LinearLoss::hinge:
        return m < 1.0 ? -t : 0.0;
      case LinearLoss::squared_hinge:
        return -2.0 * t * std::max(0.0, 1.0 - m);
      case LinearLoss::squared:
        break;
    }
    throw ConfigError("loss not valid for a classifier");
  }
  double res = s - t;
  if (r.loss == LinearLoss::squared) return 2.0 * res;
  if (r.loss == LinearLoss::hinge) return res > 0.0 ? 1.0 : (res < 0.0 ? -1.0 : 0.0);
  throw ConfigError("loss not valid for a regressor");
}

}  // namespace

const char* linear_variant_name(LinearVariant v) { return row_of(v).name; }

LinearVariant linear_variant_from_name(const std::string& name) {
  for (const VariantRow& r : kVariants)
    if (name == r.name) return r.variant;
  throw ConfigError("unknown linear variant: " + name);
}

LinearVariant linear_variant_from_parts(LinearLoss loss, Regularizer reg,
                                        bool classifier) {
  for (const VariantRow& r : kVariants)
    if (r.loss == loss && r.reg == reg && r.classifier == classifier)
      return r.variant;
  throw ConfigError("unsupported loss/regularizer/mode combination");
}

bool linear_is_classifier(LinearVariant v) { return row_of(v).classifier; }
LinearLoss linear_loss(LinearVariant v) { return row_of(v).loss; }
Regularizer linear_regularizer(LinearVariant v) { return row_of(v).reg; }

double LinearModel::score(const FeatureVector& fv) const {
  if (static_cast<std::size_t>(fv.size()) != weights.size())
    throw DataError("feature vector length does not match linear model");
  double s = bias;
  for (std::size_t j = 0; j < weights.size(); ++j) s += weights[j] * fv.values[j];
  return s;
}

LinearConfig LinearConfig::from_config(const KeyValueConfig& cfg) {
  LinearConfig c;
  if (cfg.has("linear.variant"))
    c.variant = linear_variant_from_name(cfg.get_string("linear.variant", ""));
  c.cost = cfg.get_double("linear.c", c.cost);
  c.epochs = static_cast<int>(cfg.get_int("linear.epochs", c.epochs));
  c.learning_rate = cfg.get_double("linear.learning-rate", c.learning_rate);
  c.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
  c.validate();
  return c;
}

void LinearConfig::validate() const {
  if (cost <= 0.0) throw ConfigError("linear.c must be > 0");
  if (epochs < 1) throw ConfigError("linear.epochs must be >= 1");
  if (learning_rate <= 0.0) throw ConfigError("linear.learning-rate must be > 0");
}

double linear_target(LinearVariant v, int grade) {
  if (linear_is_classifier(v)) return grade == 0 ? -1.0 : 1.0;
  return static_cast<double>(grade);
}

double linear_objective(const LinearModel& model,
                        std::span<const FeatureVector> rows,
                        std::span<const double> targets) {
  if (rows.size() != targets.size() || rows.empty())
    throw DataError("linear_objective: bad inputs");
  const VariantRow& r = row_of(model.variant);
  const double n = static_cast<double>(rows.size());
  double reg = 0.0;
  for (double w : model.weights)
    reg += r.reg == Regularizer::l1 ? std::abs(w) : 0.5 * w * w;
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    loss += instance_loss(r, model.score(rows[i]), targets[i]);
  return reg / n + model.cost / n * loss;
}

std::vector<double> linear_gradient(const LinearModel& model,
                                    std::span<const FeatureVector> rows,
                                    std::span<const double> targets,
                                    double* bias_grad) {
  if (rows.size() != targets.size() || rows.empty())
    throw DataError("linear_gradient: bad inputs");
  const VariantRow& r = row_of(model.variant);
  const double n = static_cast<double>(rows.size());
  std::vector<double> grad(model.weights.size(), 0.0);
  double gb = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double g = model.cost / n * instance_dloss(r, model.score(rows[i]), targets[i]);
    gb += g;
    for (std::size_t j = 0; j < grad.size(); ++j)
      grad[j] += g * rows[i].values[j];
  }
  for (std::size_t j = 0; j < grad.size(); ++j) {
    double w = model.weights[j];
    grad[j] += (r.reg == Regularizer::l1
                    ? (w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0))
                    : w) /
               n;
  }
  if (bias_grad) *bias_grad = gb;
  return grad;
}

LinearModel train_linear(const DatasetView& view, Objective objective,
                         const LinearConfig& config) {
  config.validate();
  std::vector<const FeatureVector*> rows;
  std::vector<double> targets;
  for (std::size_t gi = 0; gi < view.group_count(); ++gi) {
    for (const RankingInstance& inst : view.group(gi).instances) {
      if (!inst.labels.has(objective))
        throw DataError("missing " + std::string(objective_name(objective)) +
                        " label for doc " + inst.doc_id);
      rows.push_back(&inst.features);
      targets.push_back(linear_target(config.variant, inst.labels.grade(objective)));
    }
  }
  const std::size_t n = rows.size();
  if (n == 0) throw DataError("empty training view");
  const std::size_t d = static_cast<std::size_t>(view.registry().feature_count());
  const VariantRow& variant = row_of(config.variant);

  // Standardization statistics from the training fold. Constant columns get
  // unit scale so they stay inert instead of dividing by zero.
  std::vector<double> mean(d, 0.0), inv_sd(d, 1.0);
  for (const FeatureVector* fv : rows)
    for (std::size_t j = 0; j < d; ++j) mean[j] += fv->values[j];
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
  {
    std::vector<double> var(d, 0.0);
    for (const FeatureVector* fv : rows)
      for (std::size_t j = 0; j < d; ++j) {
        double c = fv->values[j] - mean[j];
        var[j] += c * c;
      }
    for (std::size_t j = 0; j < d; ++j) {
      double sd = std::sqrt(var[j] / static_cast<double>(n));
      if (sd > 0.0) inv_sd[j] = 1.0 / sd;
    }
  }

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> z(d);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  Rng rng(derive_seed(config.seed, "linear"));
  const double shrink_l1 = 1.0 / static_cast<double>(n);
  const double shrink_l2 = 1.0 / static_cast<double>(n);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double eta = config.learning_rate / (1.0 + epoch);
    for (std::uint32_t idx : order) {
      const std::vector<double>& x = rows[idx]->values;
      double s = b;
      double zz = 1.0;  // the bias input
      for (std::size_t j = 0; j < d; ++j) {
        z[j] = (x[j] - mean[j]) * inv_sd[j];
        s += w[j] * z[j];
        zz += z[j] * z[j];
      }
      // Normalizing by the squared sample norm keeps the quadratic losses
      // contractive at any feature count; without it the stable step range
      // shrinks like 1/d and wide registries diverge.
      double eta_n = eta / zz;
      double g = config.cost * instance_dloss(variant, s, targets[idx]);
      b -= eta_n * g;
      if (variant.reg == Regularizer::l2) {
        for (std::size_t j = 0; j < d; ++j)
          w[j] -= eta_n * (w[j] * shrink_l2 + g * z[j]);
      } else {
        double thr = eta_n * shrink_l1;
        for (std::size_t j = 0; j < d; ++j) {
          double v = w[j] - eta_n * g * z[j];
          w[j] = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
        }
      }
    }
  }

  // Fold the standardization into raw-space weights:
  //   w.z + b = sum_j (w_j/sd_j) x_j + (b - sum_j w_j mean_j / sd_j).
  LinearModel model;
  model.variant = config.variant;
  model.cost = config.cost;
  model.weights.resize(d);
  model.bias = b;
  for (std::size_t j = 0; j < d; ++j) {
    model.weights[j] = w[j] * inv_sd[j];
    model.bias -= w[j] * mean[j] * inv_sd[j];
  }
  return model;
}

}  // namespace ltr
