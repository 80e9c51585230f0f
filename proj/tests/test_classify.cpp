#include <doctest.h>

#include <cmath>
#include <random>

#include "prrbc/classify.hpp"

using namespace prrbc;

namespace {

// two Gaussian blobs in 2D with the given center separation (units of std)
void make_blobs(int n, double margin, uint64_t seed, Eigen::MatrixXd& X,
                std::vector<int>& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  X.resize(n, 2);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    const int cls = i % 2;
    X(i, 0) = dist(rng) + (cls ? margin : 0.0);
    X(i, 1) = dist(rng) + (cls ? margin : 0.0);
    y[i] = cls + 1;
  }
}

// synthetic dataset whose class-dependent signals differ in waveform
std::vector<LabeledSample> synthetic_dataset(int n, double separation, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::uniform_int_distribution<int> coin(1, 2);
  std::vector<LabeledSample> out(n);
  const int n_t = 200;
  for (int s = 0; s < n; ++s) {
    LabeledSample& smp = out[s];
    smp.id = s;
    smp.seed = seed + s;
    smp.parameters = Eigen::VectorXd::Zero(45);
    for (int c = 0; c < 2; ++c) {
      smp.labels[c] = coin(rng);
      CorrelationInput& in = smp.signals[c];
      in.component = c;
      in.t_final = 1.0;
      in.n_sensors = 4;
      in.signals.resize(n_t + 1, 8);
      const double shape = smp.labels[c] == 2 ? separation : 0.0;
      for (int col = 0; col < 8; ++col) {
        const double a = 1.0 + 0.1 * dist(rng);
        const double ph = 0.1 * dist(rng);
        for (int t = 0; t <= n_t; ++t) {
          const double x = 2 * M_PI * t / n_t;
          in.signals(t, col) =
              a * std::sin((1.0 + 0.3 * col) * x + ph) + shape * std::sin((5.0 + col) * x);
        }
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("softmax probabilities sum to one") {
  Eigen::MatrixXd X;
  std::vector<int> y;
  make_blobs(60, 3.0, 5, X, y);
  MlpClassifier m = train_classifier(X, y, TrainConfig{}, 7);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(2);
    x << dist(rng), dist(rng);
    CHECK(std::abs(m.probabilities(x).sum() - 1.0) <= 1e-12);
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  Eigen::MatrixXd X;
  std::vector<int> y1;
  make_blobs(24, 1.0, 17, X, y1);
  std::vector<int> y01(y1.size());
  for (size_t i = 0; i < y1.size(); ++i) y01[i] = y1[i] - 1;

  MlpClassifier m;
  m.W1.resize(10, 2);
  m.b1.resize(10);
  m.W2.resize(2, 10);
  m.b2.resize(2);
  m.feat_mean = Eigen::VectorXd::Zero(2);
  m.feat_scale = Eigen::VectorXd::Ones(2);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> dist;
  Eigen::VectorXd params(m.W1.size() + m.b1.size() + m.W2.size() + m.b2.size());
  for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = 0.3 * dist(rng);

  Eigen::VectorXd grad;
  mlp_loss_grad(m, params, X, y01, &grad);
  const double h = 1e-6;
  double worst = 0;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    Eigen::VectorXd p = params;
    p[i] += h;
    const double up = mlp_loss_grad(m, p, X, y01, nullptr);
    p[i] -= 2 * h;
    const double dn = mlp_loss_grad(m, p, X, y01, nullptr);
    const double fd = (up - dn) / (2 * h);
    worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1e-8, std::abs(grad[i])));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("separable blobs train to zero training error") {
  Eigen::MatrixXd X;
  std::vector<int> y;
  make_blobs(200, 5.0, 31, X, y);
  MlpClassifier m = train_classifier(X, y, TrainConfig{}, 13);
  int miss = 0;
  for (int i = 0; i < X.rows(); ++i) miss += m.predict(X.row(i)) != y[i];
  CHECK(miss == 0);
}

TEST_CASE("shuffled labels sit at chance level") {
  Eigen::MatrixXd X;
  std::vector<int> y;
  make_blobs(400, 5.0, 41, X, y);
  std::mt19937_64 rng(43);
  std::shuffle(y.begin(), y.end(), rng);
  MlpClassifier m = train_classifier(X, y, TrainConfig{}, 19);
  CHECK(m.val_accuracy >= 0.4);
  CHECK(m.val_accuracy <= 0.6);
}

TEST_CASE("training is deterministic given the seed") {
  Eigen::MatrixXd X;
  std::vector<int> y;
  make_blobs(80, 2.0, 51, X, y);
  MlpClassifier a = train_classifier(X, y, TrainConfig{}, 3);
  MlpClassifier b = train_classifier(X, y, TrainConfig{}, 3);
  CHECK((mlp_pack(a) - mlp_pack(b)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-class training sets are rejected") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 2);
  std::vector<int> y(10, 1);
  CHECK_THROWS_AS(train_classifier(X, y, TrainConfig{}, 1), std::invalid_argument);
}

TEST_CASE("structure predictions derive without retraining") {
  CHECK(derive_structure_predictions({1, 1}) ==
        std::make_pair(1, std::array<int, 2>{1, 1}));
  CHECK(derive_structure_predictions({2, 1}).first == 2);
  CHECK(derive_structure_predictions({1, 2}).first == 2);
  CHECK(derive_structure_predictions({2, 2}) ==
        std::make_pair(2, std::array<int, 2>{2, 2}));
}

TEST_CASE("loss is the zero-one mismatch indicator") {
  // L(k,k') = 0 iff k == k', mirrored by the error counting on a tiny case
  auto data = synthetic_dataset(40, 2.0, 99);
  TTConfig cfg;
  cfg.n_tt = 40;
  cfg.n_part = 2;
  cfg.sigma = 0.0;
  cfg.seed = 5;
  const ClassificationReport rep = tt_learning(data, cfg, false);
  for (int p = 0; p < cfg.n_part; ++p) {
    CHECK(rep.err_comp[0][p] >= 0.0);
    CHECK(rep.err_comp[0][p] <= 1.0);
  }
}

TEST_CASE("tt-learning error structure") {
  auto data = synthetic_dataset(120, 1.1, 7);
  TTConfig cfg;
  cfg.n_tt = 120;
  cfg.n_part = 8;
  cfg.sigma = 0.04;
  cfg.seed = 11;
  const ClassificationReport rep = tt_learning(data, cfg);

  for (int p = 0; p < cfg.n_part; ++p) {
    // any binary-structure miss is a full-state miss
    CHECK(rep.err_binary[p] <= rep.err_state[p] + 1e-12);
    // union bound over component mistakes
    CHECK(rep.err_state[p] <= rep.err_comp[0][p] + rep.err_comp[1][p] + 1e-12);
  }

  // reproducibility of the whole report
  const ClassificationReport rep2 = tt_learning(data, cfg);
  for (int p = 0; p < cfg.n_part; ++p) {
    CHECK(rep.err_comp[0][p] == rep2.err_comp[0][p]);
    CHECK(rep.err_state[p] == rep2.err_state[p]);
  }
}

TEST_CASE("perfect predictors yield zero derived errors") {
  // strongly separated classes, no noise: per-component errors vanish and so
  // do the derived binary and full-state errors
  auto data = synthetic_dataset(80, 3.0, 55);
  TTConfig cfg;
  cfg.n_tt = 80;
  cfg.n_part = 3;
  cfg.sigma = 0.0;
  cfg.seed = 21;
  const ClassificationReport rep = tt_learning(data, cfg);
  for (int p = 0; p < cfg.n_part; ++p) {
    if (rep.err_comp[0][p] == 0.0 && rep.err_comp[1][p] == 0.0) {
      CHECK(rep.err_binary[p] == 0.0);
      CHECK(rep.err_state[p] == 0.0);
    }
  }
}

TEST_CASE("one wrong and one right component bound the state error") {
  // exhaustive enumeration oracle: if component A is always wrong and B always
  // right on balanced labels, every sample is a full-state miss and a binary
  // miss happens iff flipping A's label flips the any-damage predicate,
  // i.e. for the label pairs (1,1) and (2,1): rate 1/2 on balanced labels.
  const std::array<std::array<int, 2>, 4> combos = {{{1, 1}, {1, 2}, {2, 1}, {2, 2}}};
  int state_miss = 0, binary_miss = 0;
  for (const auto& labels : combos) {
    const std::array<int, 2> pred = {labels[0] == 1 ? 2 : 1, labels[1]};  // A flipped
    const auto [pb, pt] = derive_structure_predictions(pred);
    const auto [tb, tt] = derive_structure_predictions(labels);
    state_miss += pt != tt;
    binary_miss += pb != tb;
  }
  CHECK(state_miss == 4);   // Err_a = 1
  CHECK(binary_miss == 2);  // Err_s = 1/2
}

TEST_CASE("noise cannot help in expectation") {
  auto data = synthetic_dataset(120, 0.9, 77);
  TTConfig clean_cfg;
  clean_cfg.n_tt = 120;
  clean_cfg.n_part = 8;
  clean_cfg.sigma = 0.0;
  clean_cfg.seed = 3;
  TTConfig noisy_cfg = clean_cfg;
  noisy_cfg.sigma = 0.05;
  const ClassificationReport clean = tt_learning(data, clean_cfg);
  const ClassificationReport noisy = tt_learning(data, noisy_cfg);
  for (int c = 0; c < 2; ++c) {
    const double m0 = ClassificationReport::mean(clean.err_comp[c]);
    const double m1 = ClassificationReport::mean(noisy.err_comp[c]);
    const double s0 = ClassificationReport::stddev(clean.err_comp[c]);
    CHECK(m1 >= m0 - 2 * s0);
  }
}
