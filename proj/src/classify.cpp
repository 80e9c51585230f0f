#include "prrbc/classify.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "prrbc/config.hpp"

namespace prrbc {

namespace {

Eigen::VectorXd standardize(const MlpClassifier& m, const Eigen::VectorXd& x) {
  return (x - m.feat_mean).cwiseQuotient(m.feat_scale);
}

}  // namespace

Eigen::Vector2d MlpClassifier::probabilities(const Eigen::VectorXd& feature) const {
  const Eigen::VectorXd h = (W1 * standardize(*this, feature) + b1).array().tanh();
  Eigen::Vector2d z = W2 * h + b2;
  const double zmax = z.maxCoeff();
  Eigen::Vector2d e = (z.array() - zmax).exp();
  return e / e.sum();
}

int MlpClassifier::predict(const Eigen::VectorXd& feature) const {
  const Eigen::Vector2d p = probabilities(feature);
  return p[1] > p[0] ? 2 : 1;  // exact ties resolve to the undamaged label
}

Eigen::VectorXd mlp_pack(const MlpClassifier& m) {
  Eigen::VectorXd p(m.W1.size() + m.b1.size() + m.W2.size() + m.b2.size());
  int at = 0;
  auto put = [&](const auto& block) {
    for (Eigen::Index i = 0; i < block.size(); ++i) p[at++] = block(i);
  };
  put(m.W1.reshaped());
  put(m.b1);
  put(m.W2.reshaped());
  put(m.b2);
  return p;
}

void mlp_unpack(const Eigen::VectorXd& p, MlpClassifier& m) {
  int at = 0;
  auto take = [&](auto& block) {
    for (Eigen::Index i = 0; i < block.size(); ++i) block(i) = p[at++];
  };
  auto w1 = m.W1.reshaped();
  take(w1);
  take(m.b1);
  auto w2 = m.W2.reshaped();
  take(w2);
  take(m.b2);
}

// cross-entropy over the (already standardized) batch; gradient optional
double mlp_loss_grad(MlpClassifier& m, const Eigen::VectorXd& params, const Eigen::MatrixXd& X,
                     const std::vector<int>& y01, Eigen::VectorXd* grad) {
  mlp_unpack(params, m);
  const int n = static_cast<int>(X.rows());
  const Eigen::MatrixXd H = ((m.W1 * X.transpose()).colwise() + m.b1).array().tanh();
  Eigen::MatrixXd Z = (m.W2 * H).colwise() + m.b2;  // 2 x n
  Eigen::MatrixXd P(2, n);
  double loss = 0;
  for (int s = 0; s < n; ++s) {
    const double zmax = Z.col(s).maxCoeff();
    Eigen::Vector2d e = (Z.col(s).array() - zmax).exp();
    P.col(s) = e / e.sum();
    loss -= std::log(std::max(P(y01[s], s), 1e-300));
  }
  loss /= n;
  if (grad) {
    Eigen::MatrixXd dZ = P;
    for (int s = 0; s < n; ++s) dZ(y01[s], s) -= 1.0;
    dZ /= n;
    const Eigen::MatrixXd dW2 = dZ * H.transpose();
    const Eigen::Vector2d db2 = dZ.rowwise().sum();
    const Eigen::MatrixXd dH =
        (m.W2.transpose() * dZ).cwiseProduct((1.0 - H.array().square()).matrix());
    const Eigen::MatrixXd dW1 = dH * X;
    const Eigen::VectorXd db1 = dH.rowwise().sum();

    grad->resize(params.size());
    int at = 0;
    auto put = [&](const auto& block) {
      for (Eigen::Index i = 0; i < block.size(); ++i) (*grad)[at++] = block(i);
    };
    put(dW1.reshaped());
    put(db1);
    put(dW2.reshaped());
    put(db2);
  }
  return loss;
}

MlpClassifier train_classifier(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                               TrainConfig cfg, uint64_t seed) {
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  if (n != static_cast<int>(labels.size()) || n < 2)
    throw std::invalid_argument("training set must pair every feature with a label");
  if (std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) == labels.end())
    throw std::invalid_argument("training set holds a single class");

  MlpClassifier m;
  m.feat_mean = features.colwise().mean();
  Eigen::VectorXd var =
      ((features.rowwise() - m.feat_mean.transpose()).array().square().colwise().sum() / n)
          .transpose();
  m.feat_scale = var.array().sqrt().max(1e-12);

  Eigen::MatrixXd Xs = (features.rowwise() - m.feat_mean.transpose()).array().rowwise() /
                       m.feat_scale.transpose().array();

  std::mt19937_64 rng(seed);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  int n_val = static_cast<int>(std::lround(cfg.val_fraction * n));
  n_val = std::clamp(n_val, std::min(1, n - 1), n - 1);
  const int n_train = n - n_val;

  Eigen::MatrixXd Xt(n_train, d), Xv(n_val, d);
  std::vector<int> yt(n_train), yv(n_val);
  for (int i = 0; i < n_train; ++i) {
    Xt.row(i) = Xs.row(order[i]);
    yt[i] = labels[order[i]] - 1;
  }
  for (int i = 0; i < n_val; ++i) {
    Xv.row(i) = Xs.row(order[n_train + i]);
    yv[i] = labels[order[n_train + i]] - 1;
  }
  // a single-class train split still needs both logits exercised
  if (std::adjacent_find(yt.begin(), yt.end(), std::not_equal_to<>()) == yt.end()) {
    std::swap(yt[0], yv[0]);
    Eigen::VectorXd tmp = Xt.row(0);
    Xt.row(0) = Xv.row(0);
    Xv.row(0) = tmp;
  }

  m.W1.resize(cfg.hidden, d);
  m.b1 = Eigen::VectorXd::Zero(cfg.hidden);
  m.W2.resize(2, cfg.hidden);
  m.b2 = Eigen::VectorXd::Zero(2);
  const double a1 = std::sqrt(6.0 / (d + cfg.hidden));
  const double a2 = std::sqrt(6.0 / (cfg.hidden + 2));
  std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
  for (Eigen::Index i = 0; i < m.W1.size(); ++i) m.W1.reshaped()(i) = u1(rng);
  for (Eigen::Index i = 0; i < m.W2.size(); ++i) m.W2.reshaped()(i) = u2(rng);

  Eigen::VectorXd params = mlp_pack(m), grad;
  double lr = 0.5;
  double loss = mlp_loss_grad(m, params, Xt, yt, &grad);
  Eigen::VectorXd best_params = params;
  double best_val = std::numeric_limits<double>::infinity();
  int stale = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    // one accepted descent step with step halving
    bool accepted = false;
    for (int half = 0; half < 40; ++half) {
      Eigen::VectorXd cand = params - lr * grad;
      Eigen::VectorXd cand_grad;
      const double cand_loss = mlp_loss_grad(m, cand, Xt, yt, &cand_grad);
      if (cand_loss <= loss) {
        params = std::move(cand);
        grad = std::move(cand_grad);
        loss = cand_loss;
        lr = std::min(lr * 1.1, 10.0);
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    m.train_curve.push_back(loss);
    const double val = mlp_loss_grad(m, params, Xv, yv, nullptr);
    m.val_curve.push_back(val);
    m.epochs_run = epoch + 1;
    if (val < best_val - 1e-12) {
      best_val = val;
      best_params = params;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
    if (!accepted) break;  // gradient descent stalled at machine precision
  }
  mlp_unpack(best_params, m);

  int hits = 0;
  for (int i = 0; i < n_val; ++i) {
    const Eigen::VectorXd h = (m.W1 * Xv.row(i).transpose() + m.b1).array().tanh();
    const Eigen::Vector2d z = m.W2 * h + m.b2;
    hits += (z[1] > z[0] ? 1 : 0) == yv[i];
  }
  m.val_accuracy = n_val > 0 ? static_cast<double>(hits) / n_val : 0.0;
  return m;
}

std::pair<int, std::array<int, 2>> derive_structure_predictions(const std::array<int, 2>& pred) {
  const int binary = (pred[0] == 2 || pred[1] == 2) ? 2 : 1;
  return {binary, pred};
}

double ClassificationReport::mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double ClassificationReport::stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / (v.size() - 1));
}

ClassificationReport tt_learning(std::span<const LabeledSample> dataset, const TTConfig& cfg,
                                 bool parallel) {
  if (cfg.n_tt < 4 || cfg.n_tt > static_cast<int>(dataset.size()))
    throw std::invalid_argument("n_tt exceeds the dataset size");
  if (!(cfg.phi > 0 && cfg.phi < 1) || cfg.n_part < 1)
    throw std::invalid_argument("invalid train fraction or partition count");
  for (const auto& s : dataset.first(cfg.n_tt))
    for (const auto& sig : s.signals)
      if (sig.noise_level != 0)
        throw std::invalid_argument("dataset must carry noiseless trajectories");

  // noiseless features are partition-independent
  std::array<Eigen::MatrixXd, 2> clean;
  const int n_feat = static_cast<int>(feature_of(dataset[0].signals[0], cfg.kind).size());
  for (int c = 0; c < 2; ++c) {
    clean[c].resize(cfg.n_tt, n_feat);
    for (int s = 0; s < cfg.n_tt; ++s)
      clean[c].row(s) = feature_of(dataset[s].signals[c], cfg.kind).transpose();
  }

  const int n_train = static_cast<int>(std::lround(cfg.phi * cfg.n_tt));
  const int n_test = cfg.n_tt - n_train;
  if (n_train < 2 || n_test < 1) throw std::invalid_argument("degenerate train-test split");

  ClassificationReport report;
  report.config = cfg;
  report.err_comp[0].resize(cfg.n_part);
  report.err_comp[1].resize(cfg.n_part);
  report.err_binary.resize(cfg.n_part);
  report.err_state.resize(cfg.n_part);
  int resampled = 0;
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic) reduction(+ : resampled) if (parallel)
  for (int p = 0; p < cfg.n_part; ++p) {
    try {
    std::vector<int> idx(cfg.n_tt);
    std::iota(idx.begin(), idx.end(), 0);
    // resample partitions that leave a component single-classed in training
    for (int attempt = 0;; ++attempt) {
      std::mt19937_64 rng(fnv1a64(&p, sizeof p, cfg.seed + 77) + attempt);
      std::shuffle(idx.begin(), idx.end(), rng);
      bool ok = true;
      for (int c = 0; c < 2 && ok; ++c) {
        int damaged = 0;
        for (int i = 0; i < n_train; ++i) damaged += dataset[idx[i]].labels[c] == 2;
        ok = damaged > 0 && damaged < n_train;
      }
      if (ok) break;
      if (attempt > 200) throw std::runtime_error("cannot find a two-class training partition");
      ++resampled;
    }

    std::array<MlpClassifier, 2> clf;
    for (int c = 0; c < 2; ++c) {
      Eigen::MatrixXd X(n_train, n_feat);
      std::vector<int> y(n_train);
      for (int i = 0; i < n_train; ++i) {
        X.row(i) = clean[c].row(idx[i]);
        y[i] = dataset[idx[i]].labels[c];
      }
      clf[c] = train_classifier(X, y, cfg.train,
                                fnv1a64(&c, sizeof c, cfg.seed + 31 * (p + 1)));
    }

    int miss_c[2] = {0, 0}, miss_b = 0, miss_s = 0;
    for (int i = 0; i < n_test; ++i) {
      const LabeledSample& sample = dataset[idx[n_train + i]];
      std::array<int, 2> pred{};
      for (int c = 0; c < 2; ++c) {
        const uint64_t nseed =
            fnv1a64(&sample.id, sizeof sample.id, cfg.seed + 131 * (p + 1) + 7 * c);
        const CorrelationInput noisy = add_noise(sample.signals[c], cfg.sigma, nseed);
        pred[c] = clf[c].predict(feature_of(noisy, cfg.kind));
        miss_c[c] += pred[c] != sample.labels[c];
      }
      const auto [binary, tuple] = derive_structure_predictions(pred);
      const auto [true_binary, true_tuple] = derive_structure_predictions(sample.labels);
      miss_b += binary != true_binary;
      miss_s += tuple != true_tuple;
    }
    report.err_comp[0][p] = static_cast<double>(miss_c[0]) / n_test;
    report.err_comp[1][p] = static_cast<double>(miss_c[1]) / n_test;
    report.err_binary[p] = static_cast<double>(miss_b) / n_test;
    report.err_state[p] = static_cast<double>(miss_s) / n_test;
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  report.resampled_partitions = resampled;
  return report;
}

}  // namespace prrbc
