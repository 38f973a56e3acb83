#pragma once

// Linear classification probe: a softmax classifier with no hidden layer,
// trained by mini-batch RMSprop and scored by accuracy.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "whitekit/errors.hpp"
#include "whitekit/matrix_stats.hpp"
#include "whitekit/whitening.hpp"

namespace whitekit {

enum class Split { train, dev, test };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

inline std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "test") return Split::test;
  return std::nullopt;
}

struct LabeledEmbeddingSet {
  EmbeddingMatrix embeddings;
  std::vector<int> labels;
  int n_classes = 0;
  std::optional<std::vector<Split>> splits;
};

struct ProbeConfig {
  double learning_rate = 1e-3;
  double rmsprop_decay = 0.9;
  int batch_size = 64;
  int max_epochs = 100;
  int patience = 5;
  // When false every run lasts max_epochs and keeps the final parameters.
  bool early_stopping = true;
  std::vector<double> l2_grid = {0.0, 1e-4, 1e-3, 1e-2};
  int n_folds = 10;
  std::uint64_t seed = 0;
};

enum class Protocol { kfold, fixed_split };

inline std::string_view to_string(Protocol p) {
  return p == Protocol::kfold ? "kfold" : "fixed";
}

struct LinearProbe {
  Matrix weights;  // d x C
  Vector bias;     // C

  // Argmax of the logits; ties go to the lowest class index.
  std::vector<int> predict(const Matrix& x) const {
    const Matrix logits = (x * weights).rowwise() + bias.transpose();
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Index i = 0; i < x.rows(); ++i) {
      Index arg = 0;
      for (Index c = 1; c < logits.cols(); ++c) {
        if (logits(i, c) > logits(i, arg)) arg = c;
      }
      out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
    }
    return out;
  }

  double accuracy(const Matrix& x, const std::vector<int>& labels) const {
    if (labels.empty()) return 0.0;
    const std::vector<int> pred = predict(x);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) hits += pred[i] == labels[i];
    return static_cast<double>(hits) / static_cast<double>(labels.size());
  }
};

struct TrainOutcome {
  LinearProbe probe;
  double best_dev_accuracy = 0.0;
  int best_epoch = 0;  // 1-based epoch whose parameters were kept
  int epochs_run = 0;
};

struct ProbeResult {
  double accuracy = 0.0;  // x100
  std::vector<double> per_fold_accuracies;  // x100
  double chosen_l2 = 0.0;
  std::vector<double> chosen_l2_per_fold;
  std::vector<int> n_epochs_run;
  ProbeConfig config_echo;
  Protocol protocol = Protocol::kfold;
  std::optional<WhiteningTag> whitening_applied;
};

inline void validate(const ProbeConfig& cfg) {
  if (!(cfg.learning_rate >= 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw InvalidInput("probe: learning_rate must be finite and >= 0");
  }
  if (!(cfg.rmsprop_decay > 0.0 && cfg.rmsprop_decay < 1.0)) {
    throw InvalidInput("probe: rmsprop_decay must be in (0, 1)");
  }
  if (cfg.batch_size < 1 || cfg.max_epochs < 1 || cfg.patience < 1 ||
      cfg.n_folds < 1) {
    throw InvalidInput("probe: batch_size, max_epochs, patience and n_folds "
                       "must be positive");
  }
  if (cfg.l2_grid.empty()) throw InvalidInput("probe: empty l2 grid");
  for (double l2 : cfg.l2_grid) {
    if (!(l2 >= 0.0) || !std::isfinite(l2)) {
      throw InvalidInput("probe: l2 values must be finite and >= 0");
    }
  }
}

inline std::vector<std::size_t> class_counts(const std::vector<int>& labels,
                                             int n_classes) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= n_classes) {
      throw InvalidInput("label " + std::to_string(y) + " outside [0, " +
                         std::to_string(n_classes) + ")");
    }
    ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

inline void validate(const LabeledEmbeddingSet& set) {
  require_embeddings(set.embeddings, "labeled set");
  if (set.n_classes < 2) throw InvalidInput("labeled set: need >= 2 classes");
  if (set.labels.size() != static_cast<std::size_t>(set.embeddings.rows())) {
    throw InvalidInput("labeled set: label count does not match rows");
  }
  const auto counts = class_counts(set.labels, set.n_classes);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw InvalidInput("labeled set: class " + std::to_string(c) +
                         " has no examples");
    }
  }
  if (set.splits && set.splits->size() != set.labels.size()) {
    throw InvalidInput("labeled set: split tags do not cover all rows");
  }
}

inline LabeledEmbeddingSet subset(const LabeledEmbeddingSet& set,
                                  const std::vector<Index>& rows) {
  LabeledEmbeddingSet out;
  out.n_classes = set.n_classes;
  out.embeddings.resize(static_cast<Index>(rows.size()), set.embeddings.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.embeddings.row(static_cast<Index>(i)) = set.embeddings.row(rows[i]);
    out.labels.push_back(set.labels[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

namespace detail {

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

// Row-wise softmax. The normalizer sums the exponentials in sorted order so
// that relabeling classes permutes the output exactly.
inline Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  std::vector<double> sorted(static_cast<std::size_t>(logits.cols()));
  for (Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    for (Index c = 0; c < logits.cols(); ++c) {
      p(i, c) = std::exp(logits(i, c) - m);
      sorted[static_cast<std::size_t>(c)] = p(i, c);
    }
    std::sort(sorted.begin(), sorted.end());
    double z = 0.0;
    for (double v : sorted) z += v;
    p.row(i) /= z;
  }
  return p;
}

struct RmspropState {
  Matrix acc_w;
  Vector acc_b;
};

// One pass over `x` in a freshly shuffled order.
inline void rmsprop_epoch(const Matrix& x, const std::vector<int>& y,
                          double l2, const ProbeConfig& cfg, LinearProbe& probe,
                          RmspropState& state, std::mt19937_64& rng) {
  const Index n = x.rows();
  const Index n_classes = probe.bias.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  const double decay = cfg.rmsprop_decay;
  const double lr = cfg.learning_rate;
  constexpr double kStabilizer = 1e-8;
  for (Index start = 0; start < n; start += cfg.batch_size) {
    const Index b = std::min<Index>(cfg.batch_size, n - start);
    Matrix xb(b, x.cols());
    Matrix target = Matrix::Zero(b, n_classes);
    for (Index i = 0; i < b; ++i) {
      const Index r = order[static_cast<std::size_t>(start + i)];
      xb.row(i) = x.row(r);
      target(i, y[static_cast<std::size_t>(r)]) = 1.0;
    }
    const Matrix logits = (xb * probe.weights).rowwise() + probe.bias.transpose();
    const Matrix delta = (softmax_rows(logits) - target) / static_cast<double>(b);
    const Matrix grad_w = xb.transpose() * delta + l2 * probe.weights;
    const Vector grad_b = delta.colwise().sum().transpose();

    state.acc_w = decay * state.acc_w + (1.0 - decay) * grad_w.cwiseAbs2();
    state.acc_b = decay * state.acc_b + (1.0 - decay) * grad_b.cwiseAbs2();
    probe.weights.array() -=
        lr * grad_w.array() / (state.acc_w.array().sqrt() + kStabilizer);
    probe.bias.array() -=
        lr * grad_b.array() / (state.acc_b.array().sqrt() + kStabilizer);
  }
}

inline LinearProbe zero_probe(Index dims, int n_classes) {
  return {Matrix::Zero(dims, n_classes), Vector::Zero(n_classes)};
}

inline RmspropState zero_state(Index dims, int n_classes) {
  return {Matrix::Zero(dims, n_classes), Vector::Zero(n_classes)};
}

}  // namespace detail

// Trains on `train`, keeps the parameters of the epoch with the best dev
// accuracy and stops after `patience` epochs without improvement.
inline TrainOutcome train_linear_probe(const LabeledEmbeddingSet& train,
                                       const LabeledEmbeddingSet& dev, double l2,
                                       const ProbeConfig& cfg,
                                       std::uint64_t stream = 0) {
  validate(cfg);
  require_embeddings(train.embeddings, "train_linear_probe: train");
  require_embeddings(dev.embeddings, "train_linear_probe: dev");
  if (train.embeddings.cols() != dev.embeddings.cols() ||
      train.n_classes != dev.n_classes) {
    throw InvalidInput("train_linear_probe: train and dev disagree on d or C");
  }
  if (!(l2 >= 0.0)) throw InvalidInput("train_linear_probe: l2 must be >= 0");
  const auto train_counts = class_counts(train.labels, train.n_classes);
  const auto dev_counts = class_counts(dev.labels, dev.n_classes);
  for (std::size_t c = 0; c < dev_counts.size(); ++c) {
    if (dev_counts[c] > 0 && train_counts[c] == 0) {
      throw InvalidInput("train_linear_probe: class " + std::to_string(c) +
                         " appears in dev but not in train");
    }
  }

  auto rng = detail::make_rng(cfg.seed, stream);
  const Index dims = train.embeddings.cols();
  LinearProbe probe = detail::zero_probe(dims, train.n_classes);
  auto state = detail::zero_state(dims, train.n_classes);

  TrainOutcome out{probe, -1.0, 0, 0};
  int stale = 0;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    detail::rmsprop_epoch(train.embeddings, train.labels, l2, cfg, probe, state,
                          rng);
    out.epochs_run = epoch;
    const double acc = probe.accuracy(dev.embeddings, dev.labels);
    if (!cfg.early_stopping || acc > out.best_dev_accuracy) {
      out.best_dev_accuracy = acc;
      out.best_epoch = epoch;
      out.probe = probe;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return out;
}

// Trains for exactly `epochs` epochs with no early stopping.
inline LinearProbe train_probe_epochs(const LabeledEmbeddingSet& train,
                                      double l2, int epochs,
                                      const ProbeConfig& cfg,
                                      std::uint64_t stream = 0) {
  validate(cfg);
  auto rng = detail::make_rng(cfg.seed, stream);
  const Index dims = train.embeddings.cols();
  LinearProbe probe = detail::zero_probe(dims, train.n_classes);
  auto state = detail::zero_state(dims, train.n_classes);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    detail::rmsprop_epoch(train.embeddings, train.labels, l2, cfg, probe, state,
                          rng);
  }
  return probe;
}

// Stratified fold ids in [0, n_folds). Members of each class are taken in
// one shared shuffled order and dealt round-robin, so the assignment does
// not depend on how the classes are numbered.
inline std::vector<int> stratified_folds(const std::vector<int>& labels,
                                         int n_classes, int n_folds,
                                         std::mt19937_64& rng) {
  const auto counts = class_counts(labels, n_classes);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < static_cast<std::size_t>(n_folds)) {
      throw StratificationError("class " + std::to_string(c) + " has " +
                                std::to_string(counts[c]) +
                                " examples, fewer than " +
                                std::to_string(n_folds) + " folds");
    }
  }
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> seen(counts.size(), 0);
  std::vector<int> fold(labels.size(), 0);
  for (std::size_t i : order) {
    auto& k = seen[static_cast<std::size_t>(labels[i])];
    fold[i] = static_cast<int>(k % static_cast<std::size_t>(n_folds));
    ++k;
  }
  return fold;
}

struct InnerSplit {
  std::vector<Index> train;
  std::vector<Index> dev;
};

// Stratified 90/10 split of `rows`; every tenth member of each class (in
// shuffled order) goes to dev.
inline InnerSplit inner_dev_split(const std::vector<int>& labels,
                                  const std::vector<Index>& rows, int n_classes,
                                  std::mt19937_64& rng) {
  std::vector<Index> order = rows;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> seen(static_cast<std::size_t>(n_classes), 0);
  InnerSplit out;
  for (Index r : order) {
    auto& k = seen[static_cast<std::size_t>(labels[static_cast<std::size_t>(r)])];
    (k % 10 == 9 ? out.dev : out.train).push_back(r);
    ++k;
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.dev.begin(), out.dev.end());
  if (out.dev.empty()) {
    throw StratificationError("inner split: too few examples for a dev set");
  }
  return out;
}

struct L2Selection {
  double l2 = 0.0;
  int epochs = 1;
};

// Grid search on dev accuracy; ties go to the smaller l2.
inline L2Selection select_l2(const LabeledEmbeddingSet& train,
                             const LabeledEmbeddingSet& dev,
                             const ProbeConfig& cfg, std::uint64_t stream) {
  std::vector<double> grid = cfg.l2_grid;
  std::sort(grid.begin(), grid.end());
  L2Selection best;
  double best_acc = -1.0;
  for (double l2 : grid) {
    const TrainOutcome t = train_linear_probe(train, dev, l2, cfg, stream);
    if (t.best_dev_accuracy > best_acc) {
      best_acc = t.best_dev_accuracy;
      best = {l2, std::max(1, t.best_epoch)};
    }
  }
  return best;
}

namespace detail {

inline double mode_smallest(const std::vector<double>& values) {
  std::map<double, int> freq;
  for (double v : values) ++freq[v];
  double best = values.empty() ? 0.0 : values.front();
  int best_n = 0;
  for (const auto& [v, n] : freq) {
    if (n > best_n) {
      best = v;
      best_n = n;
    }
  }
  return best;
}

inline void whiten_rows(LabeledEmbeddingSet& fit_on,
                        std::vector<LabeledEmbeddingSet*> targets,
                        const WhiteningConfig& wcfg) {
  const WhiteningModel model = fit_whitening(fit_on.embeddings, wcfg);
  for (auto* t : targets) t->embeddings = apply_whitening(model, t->embeddings);
}

}  // namespace detail

// SentEval-style evaluation. kfold: stratified folds; inside each fold a
// stratified 90/10 split picks l2 and the epoch budget, then the probe is
// retrained on the whole training portion and scored on the held-out fold.
// fixed_split: l2 is picked on the dev split and scored on the test split.
inline ProbeResult evaluate_classification(
    const LabeledEmbeddingSet& data, const ProbeConfig& cfg, Protocol protocol,
    const std::optional<WhiteningConfig>& whitening = std::nullopt) {
  validate(cfg);
  validate(data);
  if (static_cast<Index>(data.n_classes) > data.embeddings.rows()) {
    throw InvalidInput("evaluate_classification: more classes than rows");
  }

  ProbeResult result;
  result.config_echo = cfg;
  result.protocol = protocol;
  if (whitening) {
    result.whitening_applied = WhiteningTag{whitening->kind, whitening->fit_scope};
  }

  LabeledEmbeddingSet working = data;
  if (whitening && whitening->fit_scope == FitScope::all_data) {
    const WhiteningModel model = fit_whitening(working.embeddings, *whitening);
    working.embeddings = apply_whitening(model, working.embeddings);
  }
  const bool per_fold_whitening =
      whitening && whitening->fit_scope == FitScope::train_only;

  if (protocol == Protocol::fixed_split) {
    if (!data.splits) {
      throw InvalidInput("evaluate_classification: fixed split needs split tags");
    }
    std::vector<Index> rows[3];
    for (std::size_t i = 0; i < data.splits->size(); ++i) {
      rows[static_cast<int>((*data.splits)[i])].push_back(static_cast<Index>(i));
    }
    for (int s = 0; s < 3; ++s) {
      if (rows[s].empty()) {
        throw InvalidInput(std::string("evaluate_classification: empty ") +
                           std::string(to_string(static_cast<Split>(s))) +
                           " split");
      }
    }
    LabeledEmbeddingSet train = subset(working, rows[0]);
    LabeledEmbeddingSet dev = subset(working, rows[1]);
    LabeledEmbeddingSet test = subset(working, rows[2]);
    if (per_fold_whitening) {
      detail::whiten_rows(train, {&dev, &test, &train}, *whitening);
    }
    const L2Selection sel = select_l2(train, dev, cfg, 1);
    const TrainOutcome t = train_linear_probe(train, dev, sel.l2, cfg, 1);
    const double acc = 100.0 * t.probe.accuracy(test.embeddings, test.labels);
    result.per_fold_accuracies = {acc};
    result.chosen_l2_per_fold = {sel.l2};
    result.n_epochs_run = {t.epochs_run};
    result.accuracy = acc;
    result.chosen_l2 = sel.l2;
    return result;
  }

  auto fold_rng = detail::make_rng(cfg.seed, 0);
  const std::vector<int> fold =
      stratified_folds(data.labels, data.n_classes, cfg.n_folds, fold_rng);

  for (int f = 0; f < cfg.n_folds; ++f) {
    std::vector<Index> train_rows, test_rows;
    for (std::size_t i = 0; i < fold.size(); ++i) {
      (fold[i] == f ? test_rows : train_rows).push_back(static_cast<Index>(i));
    }
    const auto stream = static_cast<std::uint64_t>(f) + 1;
    auto rng = detail::make_rng(cfg.seed, stream);
    LabeledEmbeddingSet portion = subset(working, train_rows);
    LabeledEmbeddingSet test = subset(working, test_rows);
    if (per_fold_whitening) {
      detail::whiten_rows(portion, {&test, &portion}, *whitening);
    }
    std::vector<Index> local(train_rows.size());
    std::iota(local.begin(), local.end(), Index{0});
    const InnerSplit inner =
        inner_dev_split(portion.labels, local, data.n_classes, rng);
    const L2Selection sel = select_l2(subset(portion, inner.train),
                                      subset(portion, inner.dev), cfg, stream);
    const LinearProbe probe =
        train_probe_epochs(portion, sel.l2, sel.epochs, cfg, stream);
    result.per_fold_accuracies.push_back(
        100.0 * probe.accuracy(test.embeddings, test.labels));
    result.chosen_l2_per_fold.push_back(sel.l2);
    result.n_epochs_run.push_back(sel.epochs);
  }

  double sum = 0.0;
  for (double a : result.per_fold_accuracies) sum += a;
  result.accuracy = sum / static_cast<double>(result.per_fold_accuracies.size());
  result.chosen_l2 = detail::mode_smallest(result.chosen_l2_per_fold);
  return result;
}

}  // namespace whitekit
