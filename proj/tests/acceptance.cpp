// Acceptance gate for the toolkit: ten end-to-end checks, one line each.
// Usage: ltr_acceptance <path-to-ltr-cli> [comma-separated criterion ids]
// Oracle checks recompute expected values independently of the library code
// under test; benchmark checks assert the qualitative findings the synthetic
// world is designed to exhibit at fixed seeds.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <variant>
#include <vector>

#include "ltr/dataset.hpp"
#include "ltr/error.hpp"
#include "ltr/experiments.hpp"
#include "ltr/gbdt.hpp"
#include "ltr/labels.hpp"
#include "ltr/linear.hpp"
#include "ltr/metrics.hpp"
#include "ltr/ranknet.hpp"
#include "ltr/rng.hpp"
#include "ltr/synth.hpp"
#include "ltr/tree.hpp"

namespace fs = std::filesystem;
using namespace ltr;

namespace {

struct Failure {
  std::string detail;
};

[[noreturn]] void fail(const std::string& detail) { throw Failure{detail}; }

void expect(bool ok, const std::string& detail) {
  if (!ok) fail(detail);
}

std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct PhaseTimer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const { return seconds_since(t0); }
};

// ---------------------------------------------------------------------------
// criterion 1: ranking metrics vs a term-by-term evaluator

double naive_dcg(const std::vector<int>& grades, int k) {
  double sum = 0.0;
  for (std::size_t i = 0; i < grades.size() && static_cast<int>(i) < k; ++i)
    sum += (std::pow(2.0, grades[i]) - 1.0) /
           std::log2(static_cast<double>(i) + 2.0);
  return sum;
}

std::string criterion_metrics() {
  PhaseTimer timer;
  Rng rng(20260815);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng.uniform_int(6);
    std::vector<int> grades(n);
    bool force_zero = rng.uniform() < 0.15;
    for (int& g : grades)
      g = force_zero ? 0 : static_cast<int>(rng.uniform_int(5));
    int k = 1 + static_cast<int>(rng.uniform_int(8));

    double got_dcg = dcg_at_k(grades, k);
    double want_dcg = naive_dcg(grades, k);
    expect(std::abs(got_dcg - want_dcg) <= 1e-12,
           "dcg mismatch " + fmt(got_dcg, 12) + " vs " + fmt(want_dcg, 12));

    std::vector<int> ideal = grades;
    std::sort(ideal.begin(), ideal.end(), std::greater<int>());
    double want_ideal = naive_dcg(ideal, k);
    std::optional<double> got = ndcg_at_k(grades, k);
    if (want_ideal == 0.0) {
      expect(!got.has_value(), "ndcg should be undefined on all-zero grades");
    } else {
      expect(got.has_value(), "ndcg unexpectedly undefined");
      expect(std::abs(*got - want_dcg / want_ideal) <= 1e-12,
             "ndcg mismatch at trial " + std::to_string(trial));
    }
  }

  std::vector<int> hand1 = {4, 0, 0};
  expect(std::abs(dcg_at_k(hand1, 3) - 15.0) <= 1e-4, "hand dcg [4,0,0]");
  std::vector<int> hand2 = {0, 4};
  std::optional<double> h2 = ndcg_at_k(hand2, 2);
  expect(h2.has_value() && std::abs(*h2 - 0.6309) <= 1e-4, "hand ndcg [0,4]");

  double secs = timer.elapsed();
  expect(secs < 5.0, "runtime " + fmt(secs, 1) + "s over 5s budget");
  return "1000 random rankings + hand cases, " + fmt(secs, 2) + "s";
}

// ---------------------------------------------------------------------------
// criterion 2: grade discretization properties on random engagement records

std::string criterion_labels() {
  PhaseTimer timer;
  Rng rng(911);
  long long records_done = 0;
  while (records_done < 10000) {
    std::size_t n = 1 + rng.uniform_int(10);
    std::vector<EngagementRecord> group(n);
    for (std::size_t i = 0; i < n; ++i) {
      EngagementRecord& r = group[i];
      r.impressions = 1 + static_cast<long long>(rng.uniform_int(500));
      r.clicks = static_cast<long long>(
          rng.uniform_int(static_cast<std::uint64_t>(r.impressions) + 1));
      r.atc = static_cast<long long>(
          rng.uniform_int(static_cast<std::uint64_t>(r.clicks) + 1));
      r.orders = static_cast<long long>(
          rng.uniform_int(static_cast<std::uint64_t>(r.atc) + 1));
      r.revenue = r.orders > 0
                      ? static_cast<double>(r.orders) * rng.uniform(5.0, 500.0)
                      : 0.0;
    }
    records_done += static_cast<long long>(n);

    for (Objective o : kAllObjectives) {
      std::vector<double> rates(n);
      for (std::size_t i = 0; i < n; ++i)
        rates[i] = compute_rates(group[i]).rate(o);
      std::vector<int> grades = discretize_labels(rates);
      double max_rate = *std::max_element(rates.begin(), rates.end());

      for (std::size_t i = 0; i < n; ++i) {
        expect(grades[i] >= 0 && grades[i] <= 4, "grade out of range");
        if (rates[i] == 0.0) expect(grades[i] == 0, "zero rate must grade 0");
        if (max_rate > 0.0 && rates[i] == max_rate)
          expect(grades[i] == 4, "argmax rate must grade 4");
        if (max_rate == 0.0) expect(grades[i] == 0, "all-zero rates grade 0");
        for (std::size_t j = 0; j < n; ++j)
          if (rates[i] > rates[j])
            expect(grades[i] >= grades[j], "grades not monotone in rates");
      }

      double scale = std::exp(rng.uniform(-10.0, 10.0));
      std::vector<double> scaled(n);
      for (std::size_t i = 0; i < n; ++i) scaled[i] = rates[i] * scale;
      expect(discretize_labels(scaled) == grades,
             "grades changed under positive scaling x" + fmt(scale, 6));
    }
  }
  double secs = timer.elapsed();
  expect(secs < 5.0, "runtime " + fmt(secs, 1) + "s over 5s budget");
  return std::to_string(records_done) + " records x 4 objectives, " +
         fmt(secs, 2) + "s";
}

// ---------------------------------------------------------------------------
// criterion 3: analytic gradients vs central finite differences

double rel_gap(double got, double want) {
  double scale = std::max({std::abs(got), std::abs(want), 1.0});
  return std::abs(got - want) / scale;
}

void check_ranknet_point(Rng& rng) {
  RankNetModel m;
  m.input_dim = 3 + static_cast<int>(rng.uniform_int(4));
  m.hidden_dim = 2 + static_cast<int>(rng.uniform_int(3));
  m.w1.resize(static_cast<std::size_t>(m.input_dim * m.hidden_dim));
  m.b1.resize(static_cast<std::size_t>(m.hidden_dim));
  m.w2.resize(static_cast<std::size_t>(m.hidden_dim));
  for (double& v : m.w1) v = rng.normal();
  for (double& v : m.b1) v = rng.normal();
  for (double& v : m.w2) v = rng.normal();
  m.b2 = rng.normal();
  FeatureVector hi(static_cast<std::size_t>(m.input_dim));
  FeatureVector lo(static_cast<std::size_t>(m.input_dim));
  for (int f = 1; f <= m.input_dim; ++f) {
    hi.set(f, rng.uniform(-2.0, 2.0));
    lo.set(f, rng.uniform(-2.0, 2.0));
  }

  RankNetGradient g = ranknet_pair_gradient(m, hi, lo);
  const double h = 1e-6;
  auto fd_param = [&](double* p) {
    double keep = *p;
    *p = keep + h;
    double up = ranknet_pair_loss(m, hi, lo);
    *p = keep - h;
    double dn = ranknet_pair_loss(m, hi, lo);
    *p = keep;
    return (up - dn) / (2.0 * h);
  };
  for (std::size_t i = 0; i < m.w1.size(); ++i)
    expect(rel_gap(g.w1[i], fd_param(&m.w1[i])) <= 1e-4, "ranknet w1 gradient");
  for (std::size_t i = 0; i < m.b1.size(); ++i)
    expect(rel_gap(g.b1[i], fd_param(&m.b1[i])) <= 1e-4, "ranknet b1 gradient");
  for (std::size_t i = 0; i < m.w2.size(); ++i)
    expect(rel_gap(g.w2[i], fd_param(&m.w2[i])) <= 1e-4, "ranknet w2 gradient");
  expect(rel_gap(g.b2, fd_param(&m.b2)) <= 1e-4, "ranknet b2 gradient");
}

bool check_linear_point(Rng& rng, LinearVariant variant) {
  int d = 3 + static_cast<int>(rng.uniform_int(3));
  std::size_t rows_n = 4 + rng.uniform_int(5);
  LinearModel m;
  m.variant = variant;
  m.cost = std::exp(rng.uniform(-1.5, 1.5));
  m.weights.resize(static_cast<std::size_t>(d));
  for (double& w : m.weights) w = rng.normal();
  m.bias = rng.normal();

  std::vector<FeatureVector> rows(rows_n, FeatureVector(static_cast<std::size_t>(d)));
  std::vector<double> targets(rows_n);
  for (std::size_t i = 0; i < rows_n; ++i) {
    for (int f = 1; f <= d; ++f) rows[i].set(f, rng.uniform(-2.0, 2.0));
    int grade = static_cast<int>(rng.uniform_int(5));
    targets[i] = linear_target(variant, grade);
  }

  // Reject draws near a kink so the objective is differentiable at the point.
  if (linear_regularizer(variant) == Regularizer::l1)
    for (double w : m.weights)
      if (std::abs(w) < 0.05) return false;
  LinearLoss loss = linear_loss(variant);
  for (std::size_t i = 0; i < rows_n; ++i) {
    double s = m.score(rows[i]);
    if (loss == LinearLoss::hinge && std::abs(1.0 - targets[i] * s) < 0.05)
      return false;
    if (loss == LinearLoss::squared_hinge &&
        std::abs(1.0 - targets[i] * s) < 0.05)
      return false;
    if (m.variant == LinearVariant::l2_absolute &&
        std::abs(targets[i] - s) < 0.05)
      return false;
  }

  double bias_grad = 0.0;
  std::vector<double> g = linear_gradient(m, rows, targets, &bias_grad);
  const double h = 1e-6;
  auto objective_at = [&] { return linear_objective(m, rows, targets); };
  for (int j = 0; j < d; ++j) {
    double keep = m.weights[static_cast<std::size_t>(j)];
    m.weights[static_cast<std::size_t>(j)] = keep + h;
    double up = objective_at();
    m.weights[static_cast<std::size_t>(j)] = keep - h;
    double dn = objective_at();
    m.weights[static_cast<std::size_t>(j)] = keep;
    expect(rel_gap(g[static_cast<std::size_t>(j)], (up - dn) / (2.0 * h)) <= 1e-4,
           std::string("linear weight gradient, variant ") +
               linear_variant_name(variant));
  }
  double keep = m.bias;
  m.bias = keep + h;
  double up = objective_at();
  m.bias = keep - h;
  double dn = objective_at();
  m.bias = keep;
  expect(rel_gap(bias_grad, (up - dn) / (2.0 * h)) <= 1e-4,
         "linear bias gradient");
  return true;
}

void check_lambda_pair(Rng& rng) {
  int gi = 1 + static_cast<int>(rng.uniform_int(4));
  int gj = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(gi)));
  double si = rng.uniform(-3.0, 3.0);
  double sj = si;
  while (std::abs(si - sj) < 1e-2) sj = rng.uniform(-3.0, 3.0);
  int k = 1 + static_cast<int>(rng.uniform_int(2));
  std::vector<int> grades = {gi, gj};
  std::vector<double> scores = {si, sj};
  LambdaState state = compute_lambdas(grades, scores, k);

  // Docs sorted by descending score give the ranks; grades sorted descending
  // give the ideal. Both docs present, scores distinct by construction.
  int rank_i = si > sj ? 1 : 2;
  int rank_j = 3 - rank_i;
  auto discount = [k](int rank) {
    return rank <= k ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0;
  };
  double ideal = (std::pow(2.0, gi) - 1.0) / std::log2(2.0);
  if (k >= 2) ideal += (std::pow(2.0, gj) - 1.0) / std::log2(3.0);
  double delta = std::abs((std::pow(2.0, gi) - std::pow(2.0, gj)) *
                          (discount(rank_i) - discount(rank_j))) /
                 ideal;
  if (delta == 0.0) {
    expect(state.lambdas[0] == 0.0 && state.lambdas[1] == 0.0,
           "out-of-window pair must leave lambdas zero");
    return;
  }

  // The pair cost holds delta fixed; lambdas are its negative derivatives.
  auto cost = [delta](double a, double b) {
    return delta * std::log1p(std::exp(-(a - b)));
  };
  const double h = 1e-6;
  double fd_i = -(cost(si + h, sj) - cost(si - h, sj)) / (2.0 * h);
  double fd_j = -(cost(si, sj + h) - cost(si, sj - h)) / (2.0 * h);
  expect(rel_gap(state.lambdas[0], fd_i) <= 1e-6, "lambda_i vs fd");
  expect(rel_gap(state.lambdas[1], fd_j) <= 1e-6, "lambda_j vs fd");
  double rho = 1.0 / (1.0 + std::exp(si - sj));
  expect(rel_gap(state.weights[0], rho * (1.0 - rho) * delta) <= 1e-9 &&
             state.weights[0] == state.weights[1],
         "pair weights");
}

std::string criterion_gradients() {
  PhaseTimer timer;
  Rng rng(5150);
  for (int i = 0; i < 100; ++i) check_ranknet_point(rng);

  const LinearVariant variants[6] = {
      LinearVariant::l1_logistic,      LinearVariant::l2_logistic,
      LinearVariant::l1_squared_hinge, LinearVariant::l2_hinge,
      LinearVariant::l2_squared,       LinearVariant::l2_absolute};
  int accepted = 0, attempts = 0;
  while (accepted < 100) {
    expect(++attempts < 5000, "smooth-point sampler stalled");
    if (check_linear_point(rng, variants[accepted % 6])) ++accepted;
  }

  for (int i = 0; i < 200; ++i) check_lambda_pair(rng);

  double secs = timer.elapsed();
  expect(secs < 30.0, "runtime " + fmt(secs, 1) + "s over 30s budget");
  return "100 ranknet + 100 linear + 200 lambda points, " + fmt(secs, 2) + "s";
}

// ---------------------------------------------------------------------------
// criterion 4: first split vs exhaustive enumeration

struct SplitPick {
  double gain = 0.0;
  int feature = 0;
  double threshold = 0.0;
};

double oracle_split_threshold(double lo, double hi) {
  double mid = lo + (hi - lo) / 2.0;
  return mid >= hi ? lo : mid;
}

// Scans every feature's (value, id)-sorted order with prefix sums, accepting
// a candidate only when it strictly beats the best so far. Mirrors the
// trainer's arithmetic so agreement is exact, but enumerates independently.
SplitPick oracle_first_split(const std::vector<std::vector<double>>& columns,
                             const std::vector<double>& targets,
                             const std::vector<double>& weights,
                             int min_instances) {
  const std::size_t n = targets.size();
  double sum_w = 0.0, sum_wt = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_w += weights[i];
    sum_wt += weights[i] * targets[i];
  }
  const double min_gain =
      sum_w > 0.0 ? 1e-12 * (sum_wt * sum_wt / sum_w) : 0.0;

  SplitPick best;
  for (std::size_t f = 0; f < columns.size(); ++f) {
    const std::vector<double>& col = columns[f];
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::sort(order.begin(), order.end(),
              [&col](std::uint32_t a, std::uint32_t b) {
                return col[a] != col[b] ? col[a] < col[b] : a < b;
              });
    SplitPick local;
    double w_left = 0.0, wt_left = 0.0;
    std::uint32_t c_left = 0;
    double prev = 0.0;
    bool have_prev = false;
    for (std::uint32_t id : order) {
      double v = col[id];
      if (have_prev && v != prev) {
        std::uint32_t c_right = static_cast<std::uint32_t>(n) - c_left;
        if (c_left >= static_cast<std::uint32_t>(min_instances) &&
            c_right >= static_cast<std::uint32_t>(min_instances)) {
          double w_right = sum_w - w_left;
          double wt_right = sum_wt - wt_left;
          double gain = 0.0;
          if (w_left > 0.0) gain += wt_left * wt_left / w_left;
          if (w_right > 0.0) gain += wt_right * wt_right / w_right;
          if (sum_w > 0.0) gain -= sum_wt * sum_wt / sum_w;
          if (gain > min_gain && gain > local.gain) {
            local.gain = gain;
            local.feature = static_cast<int>(f) + 1;
            local.threshold = oracle_split_threshold(prev, v);
          }
        }
      }
      w_left += weights[id];
      wt_left += weights[id] * targets[id];
      ++c_left;
      prev = v;
      have_prev = true;
    }
    if (local.feature != 0 && local.gain > best.gain) best = local;
  }
  return best;
}

std::string criterion_tree_split() {
  PhaseTimer timer;
  Rng rng(40404);
  int with_split = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 8;
    const int d = 3;
    std::vector<std::vector<double>> columns(
        static_cast<std::size_t>(d), std::vector<double>(n));
    std::vector<FeatureVector> rows(n, FeatureVector(static_cast<std::size_t>(d)));
    for (std::size_t i = 0; i < n; ++i)
      for (int f = 0; f < d; ++f) {
        double v = static_cast<double>(rng.uniform_int(4));  // forces ties
        columns[static_cast<std::size_t>(f)][i] = v;
        rows[i].set(f + 1, v);
      }
    std::vector<double> targets(n), weights(n);
    for (std::size_t i = 0; i < n; ++i) {
      targets[i] = rng.uniform(-5.0, 5.0);
      weights[i] = rng.uniform(0.25, 2.0);
    }
    int min_instances = 1 + static_cast<int>(rng.uniform_int(3));

    SplitPick want = oracle_first_split(columns, targets, weights, min_instances);
    RegressionTree tree =
        fit_regression_tree(rows, targets, weights, 2, min_instances);
    const TreeNode& root = tree.nodes()[0];
    if (want.feature == 0) {
      expect(root.is_leaf(), "trainer split where enumeration found none");
    } else {
      ++with_split;
      expect(!root.is_leaf(), "trainer found no split at trial " +
                                  std::to_string(trial));
      expect(root.feature == want.feature,
             "split feature " + std::to_string(root.feature) + " vs " +
                 std::to_string(want.feature));
      expect(root.threshold == want.threshold,
             "split threshold " + fmt(root.threshold, 12) + " vs " +
                 fmt(want.threshold, 12));
    }
  }
  expect(with_split >= 150, "too few splittable problems: " +
                                std::to_string(with_split));
  double secs = timer.elapsed();
  expect(secs < 10.0, "runtime " + fmt(secs, 1) + "s over 10s budget");
  return "200 problems, " + std::to_string(with_split) + " with splits, " +
         fmt(secs, 2) + "s";
}

// ---------------------------------------------------------------------------
// shared fixed-seed benchmark for criteria 5-8

struct Bench {
  SyntheticWorld world;
  RankingDataset dataset;
  KeyValueConfig config;  // comparison-grade boosting budget
};

const Bench& bench() {
  static const Bench b = [] {
    PhaseTimer timer;
    Bench out;
    WorldSpec spec;  // stock spec, seed 42
    std::fprintf(stderr, "[bench] building world (seed %llu)...\n",
                 static_cast<unsigned long long>(spec.seed));
    out.world = build_world(spec);
    std::fprintf(stderr, "[bench] world built in %.1fs, featurizing...\n",
                 timer.elapsed());
    out.dataset = build_benchmark_dataset(out.world, 0.9);
    out.config.set("boosting.num-trees", "300");
    std::fprintf(stderr,
                 "[bench] dataset ready in %.1fs: %zu queries, %zu rows, %d "
                 "features\n",
                 timer.elapsed(), out.dataset.groups().size(),
                 out.dataset.instance_count(),
                 out.dataset.registry().feature_count());
    return out;
  }();
  return b;
}

double num_cell(const ReportTable& t, std::size_t r, std::size_t c,
                const std::string& what) {
  const Cell& cell = t.rows.at(r).at(c);
  if (const double* v = std::get_if<double>(&cell)) return *v;
  fail(what + " is '" + std::get<std::string>(cell) + "', not a number");
}

std::string str_cell(const ReportTable& t, std::size_t r, std::size_t c) {
  return std::get<std::string>(t.rows.at(r).at(c));
}

std::string criterion_comparison() {
  PhaseTimer timer;
  const Bench& b = bench();
  expect(b.dataset.groups().size() >= 500,
         "benchmark has " + std::to_string(b.dataset.groups().size()) +
             " queries, need >= 500");
  std::size_t min_docs = b.dataset.groups()[0].instances.size();
  for (const QueryGroup& g : b.dataset.groups())
    min_docs = std::min(min_docs, g.instances.size());
  expect(min_docs >= 50, "smallest query has " + std::to_string(min_docs) +
                             " docs, need >= 50");

  std::vector<AlgorithmSpec> algos = standard_algorithms(b.config, 42);
  ReportTable t = run_algorithm_comparison(b.dataset, algos, kAllObjectives, 5,
                                           42, b.config);
  std::fprintf(stderr, "[c5]\n%s", t.to_csv().c_str());

  std::map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < t.rows.size(); ++r) row_of[str_cell(t, r, 0)] = r;
  const std::set<std::string> linear_names = {"l1lr",     "l2lr",
                                              "l1l2svmc", "l2l1svmc",
                                              "l2l2svmr", "l2l1svmr"};
  std::string detail;
  for (std::size_t oi = 0; oi < 4; ++oi) {
    std::string obj(objective_name(kAllObjectives[oi]));
    std::size_t col = 2 + 2 * oi;  // the objective's test column
    double lm = num_cell(t, row_of.at("lambdamart"), col, "lambdamart " + obj);
    double best_other = -1.0, best_linear = -1.0;
    for (const auto& [name, r] : row_of) {
      if (name == "lambdamart") continue;
      double v = num_cell(t, r, col, name + " " + obj);
      best_other = std::max(best_other, v);
      if (linear_names.count(name)) best_linear = std::max(best_linear, v);
    }
    expect(lm >= best_other, obj + ": lambdamart " + fmt(lm) +
                                 " below best competitor " + fmt(best_other));
    expect(lm - best_linear >= 0.03,
           obj + ": margin over best linear " + fmt(lm - best_linear) +
               " < 0.03");
    detail += (detail.empty() ? "" : " ") + obj + "+" + fmt(lm - best_linear);
  }
  double secs = timer.elapsed();
  expect(secs < 1800.0, "runtime " + fmt(secs, 0) + "s over 30min budget");
  return "margins over best linear: " + detail + ", " + fmt(secs, 0) + "s";
}

std::string criterion_popularity() {
  PhaseTimer timer;
  const Bench& b = bench();
  ReportTable with = run_popularity_ablation(b.dataset, Objective::order_rate,
                                             5, 42, b.config);
  std::fprintf(stderr, "[c6 default]\n%s", with.to_csv().c_str());
  double gap = num_cell(with, 2, 2, "ablation difference");
  expect(gap >= 0.02, "popularity gap " + fmt(gap) + " < 0.02");

  WorldSpec flat;  // same world except shoppers ignore popularity
  flat.user.weight_popularity = 0.0;
  SyntheticWorld flat_world = build_world(flat);
  RankingDataset flat_data = build_benchmark_dataset(flat_world, 0.9);
  ReportTable without = run_popularity_ablation(
      flat_data, Objective::order_rate, 5, 42, b.config);
  std::fprintf(stderr, "[c6 flat]\n%s", without.to_csv().c_str());
  double flat_gap = num_cell(without, 2, 2, "flat-world difference");
  expect(flat_gap < 0.01,
         "gap with popularity-blind shoppers " + fmt(flat_gap) + " >= 0.01");

  return "gap " + fmt(gap) + " with popularity demand, " + fmt(flat_gap) +
         " without, " + fmt(timer.elapsed(), 0) + "s";
}

std::string criterion_holdout() {
  PhaseTimer timer;
  const Bench& b = bench();
  ReportTable t = run_department_holdout(
      b.dataset, department_tags(b.world), 10, Objective::order_rate, 42,
      b.config);
  std::fprintf(stderr, "[c7]\n%s", t.to_csv().c_str());
  expect(t.rows.size() == 10,
         "expected 10 department rows, got " + std::to_string(t.rows.size()));
  int positive = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const Cell& cell = t.rows[r].at(6);
    const double* pct = std::get_if<double>(&cell);
    if (pct != nullptr && *pct > 0.0) ++positive;
  }
  expect(positive >= 8, "intersection training helped only " +
                            std::to_string(positive) + " of 10 departments");
  return std::to_string(positive) + " of 10 departments improved, " +
         fmt(timer.elapsed(), 0) + "s";
}

std::string criterion_cross_objective() {
  PhaseTimer timer;
  const Bench& b = bench();
  CrossObjectiveResult r = run_cross_objective(b.dataset, 5, 42, b.config);
  ReportTable sig = run_significance(r, 0.05);
  std::fprintf(stderr, "[c8]\n%s%s", r.matrix.to_csv().c_str(),
               sig.to_csv().c_str());

  auto optimal_set = [&sig](std::size_t row) {
    std::set<std::string> names;
    std::istringstream in(std::get<std::string>(sig.rows.at(row).at(2)));
    std::string tok;
    while (in >> tok) names.insert(tok);
    return names;
  };
  for (std::size_t eo = 0; eo < 4; ++eo) {
    std::string test_obj(objective_name(kAllObjectives[eo]));
    std::set<std::string> optimal = optimal_set(eo);
    expect(optimal.count("or") == 1,
           "or-trained model not optimal for " + test_obj);
    expect(optimal.count(test_obj) == 1,
           test_obj + "-trained model not optimal on its own labels");
  }
  return "or-trained optimal on all four objectives, " +
         fmt(timer.elapsed(), 0) + "s";
}

// ---------------------------------------------------------------------------
// criterion 9: exact signed-rank p-values vs independent enumeration

struct OracleWilcoxon {
  double statistic = 0.0;
  double p_value = 1.0;
  int n = 0;
};

OracleWilcoxon oracle_wilcoxon(const std::vector<std::pair<double, double>>& paired) {
  OracleWilcoxon out;
  std::vector<double> d;
  for (const auto& [a, b] : paired)
    if (a != b) d.push_back(a - b);
  out.n = static_cast<int>(d.size());
  if (d.empty()) return out;

  // Average ranks of |d|, built from a sorted copy.
  std::vector<double> mag(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) mag[i] = std::abs(d[i]);
  std::vector<double> sorted_mag = mag;
  std::sort(sorted_mag.begin(), sorted_mag.end());
  std::vector<double> ranks(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::size_t lo =
        static_cast<std::size_t>(std::lower_bound(sorted_mag.begin(),
                                                  sorted_mag.end(), mag[i]) -
                                 sorted_mag.begin());
    std::size_t hi =
        static_cast<std::size_t>(std::upper_bound(sorted_mag.begin(),
                                                  sorted_mag.end(), mag[i]) -
                                 sorted_mag.begin());
    ranks[i] = (static_cast<double>(lo) + static_cast<double>(hi) + 1.0) / 2.0;
  }

  double t_plus = 0.0, t_minus = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    (d[i] > 0.0 ? t_plus : t_minus) += ranks[i];
  out.statistic = t_plus - t_minus;

  const std::uint64_t total = 1ULL << d.size();
  std::uint64_t le = 0, ge = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double t = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (mask & (1ULL << i)) t += ranks[i];
    if (t <= t_plus) ++le;
    if (t >= t_plus) ++ge;
  }
  double p_le = static_cast<double>(le) / static_cast<double>(total);
  double p_ge = static_cast<double>(ge) / static_cast<double>(total);
  out.p_value = std::min(1.0, 2.0 * std::min(p_le, p_ge));
  return out;
}

std::string criterion_wilcoxon() {
  PhaseTimer timer;
  Rng rng(321);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = 1 + rng.uniform_int(12);
    std::vector<std::pair<double, double>> paired(n);
    bool gridded = rng.uniform() < 0.6;  // exercises zeros and rank ties
    for (auto& [a, b] : paired) {
      if (gridded) {
        a = 0.25 * static_cast<double>(rng.uniform_int(13));
        b = 0.25 * static_cast<double>(rng.uniform_int(13));
      } else {
        a = rng.uniform(0.0, 1.0);
        b = rng.uniform(0.0, 1.0);
      }
    }
    SignificanceResult got = wilcoxon_signed_rank(paired, 0.05);
    OracleWilcoxon want = oracle_wilcoxon(paired);
    expect(got.n == want.n, "pair count after zero drop");
    expect(got.statistic == want.statistic,
           "statistic " + fmt(got.statistic, 6) + " vs " +
               fmt(want.statistic, 6));
    expect(got.p_value == want.p_value,
           "p " + fmt(got.p_value, 12) + " vs " + fmt(want.p_value, 12) +
               " at trial " + std::to_string(trial));
    expect(got.significant == (got.p_value <= 0.05), "significance flag");
  }
  double secs = timer.elapsed();
  expect(secs < 10.0, "runtime " + fmt(secs, 1) + "s over 10s budget");
  return "500 samples, n <= 12, exact match, " + fmt(secs, 2) + "s";
}

// ---------------------------------------------------------------------------
// criterion 10: CLI pipeline byte-for-byte determinism

std::string g_cli;

void run_cli(const std::string& args, const fs::path& stdout_to = {}) {
  std::string cmd = g_cli + " " + args;
  if (!stdout_to.empty()) cmd += " > " + stdout_to.string();
  int rc = std::system(cmd.c_str());
  expect(rc == 0, "command failed (" + std::to_string(rc) + "): " + cmd);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  expect(out.good(), "cannot write " + path.string());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  expect(in.good(), "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void run_pipeline(const fs::path& root, const fs::path& world_cfg,
                  const fs::path& train_cfg, const fs::path& exp_cfg) {
  fs::create_directories(root);
  const std::string r = root.string();
  run_cli("gen --spec " + world_cfg.string() + " --out-dir " + r + "/world");
  run_cli("featurize --world " + r + "/world --predictor-accuracy 0.9 --out " +
          r + "/features.txt");
  run_cli("labels --log " + r + "/world/log.csv --features " + r +
          "/features.txt --threshold 40 --out " + r + "/labels");
  run_cli("split --data " + r + "/labels.or.letor --k 3 --seed 9 --out " + r +
          "/cv_");
  for (const char* algo : {"lambdamart", "l2l1svmr", "ranknet"})
    run_cli(std::string("train --algo ") + algo + " --data " + r +
            "/cv_fold0.train.letor --objective or --config " +
            train_cfg.string() + " --seed 5 --out " + r + "/model_" + algo +
            ".bin");
  run_cli("eval --model " + r + "/model_lambdamart.bin --data " + r +
              "/cv_fold0.test.letor --k 10",
          root / "eval_lambdamart.csv");
  run_cli("experiment audit --config " + exp_cfg.string() + " --seed 7 --out " +
          r + "/reports");
  run_cli("experiment labeldist --config " + exp_cfg.string() +
          " --seed 7 --out " + r + "/reports");
}

std::string criterion_determinism() {
  PhaseTimer timer;
  expect(!g_cli.empty(), "cli path not provided");
  fs::path base = fs::temp_directory_path() /
                  ("ltr-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);

  const std::string world_cfg =
      "world.seed = 7\n"
      "world.departments = 4\n"
      "world.products-per-department = 60\n"
      "world.queries = 24\n"
      "world.attr-keys = 12\n"
      "world.values-per-key = 3\n"
      "world.nouns-per-department = 8\n"
      "world.adjectives = 6\n"
      "world.candidate-pool = 15\n"
      "world.impression-threshold = 40\n";
  write_file(base / "world.conf", world_cfg);
  write_file(base / "train.conf",
             "boosting.num-trees = 10\n"
             "trees.num-leaves = 5\n"
             "boosting.sub-sampling = 0.5\n"
             "trees.feature-sampling = 0.5\n"
             "ranknet.epochs = 2\n"
             "ranknet.pairs-per-epoch = 2000\n"
             "linear.epochs = 5\n");
  write_file(base / "exp.conf",
             world_cfg +
                 "featurize.predictor-accuracy = 0.9\n"
                 "experiment.folds = 3\n");

  for (const char* leg : {"a", "b"})
    run_pipeline(base / leg, base / "world.conf", base / "train.conf",
                 base / "exp.conf");

  std::vector<fs::path> rel;
  for (const auto& entry : fs::recursive_directory_iterator(base / "a"))
    if (entry.is_regular_file())
      rel.push_back(fs::relative(entry.path(), base / "a"));
  std::sort(rel.begin(), rel.end());
  expect(rel.size() >= 15, "pipeline produced only " +
                               std::to_string(rel.size()) + " files");
  for (const fs::path& p : rel)
    expect(slurp(base / "a" / p) == slurp(base / "b" / p),
           "re-run differs at " + p.string());
  fs::remove_all(base);
  return std::to_string(rel.size()) + " files byte-identical across re-runs, " +
         fmt(timer.elapsed(), 0) + "s";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc >= 2) g_cli = argv[1];
  std::set<int> only;
  if (argc >= 3) {
    std::istringstream in(argv[2]);
    std::string tok;
    while (std::getline(in, tok, ',')) only.insert(std::stoi(tok));
  }

  struct Entry {
    int id;
    const char* name;
    std::string (*run)();
  };
  const Entry entries[] = {
      {1, "ranking metric oracle", criterion_metrics},
      {2, "label discretization properties", criterion_labels},
      {3, "gradient finite-difference checks", criterion_gradients},
      {4, "tree first-split oracle", criterion_tree_split},
      {5, "benchmark algorithm comparison", criterion_comparison},
      {6, "popularity feature ablation", criterion_popularity},
      {7, "department holdout intersection", criterion_holdout},
      {8, "cross-objective optimal sets", criterion_cross_objective},
      {9, "signed-rank test oracle", criterion_wilcoxon},
      {10, "pipeline determinism", criterion_determinism},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    if (!only.empty() && !only.count(e.id)) continue;
    std::string verdict, detail;
    try {
      detail = e.run();
      verdict = "PASS";
    } catch (const Failure& f) {
      detail = f.detail;
      verdict = "FAIL";
      ++failures;
    } catch (const std::exception& ex) {
      detail = std::string("unexpected error: ") + ex.what();
      verdict = "FAIL";
      ++failures;
    }
    std::printf("criterion %d: %s (%s: %s)\n", e.id, verdict.c_str(), e.name,
                detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
