// Acceptance suite: one pass/fail line per criterion, exit code = failures.
// Heavy artifacts (offline cache, datasets) are cached in the work directory
// and reused across runs.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

#include "prrbc/dataset.hpp"
#include "prrbc/io.hpp"
#include "prrbc/newmark.hpp"

using namespace prrbc;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void verdict(bool pass, int criterion, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---- criterion 1: Newmark convergence order on the analytic oscillator ----

double oscillator_max_error(int n_t) {
  SparseMat M(1, 1), C(1, 1), K(1, 1);
  M.insert(0, 0) = 1;
  C.insert(0, 0) = 0;
  K.insert(0, 0) = 1;
  const double t_final = M_PI;
  const double dt = t_final / n_t;
  double max_err = 0;
  fe_newmark_march(
      M, C, K, [](int, Eigen::VectorXd& f) { f.setConstant(1.0); }, t_final, n_t,
      [&](int j, const Eigen::VectorXd& u, const Eigen::VectorXd&, const Eigen::VectorXd&) {
        max_err = std::max(max_err, std::abs(u[0] - (1.0 - std::cos(j * dt))));
      });
  return max_err;
}

void criterion_1() {
  const auto t0 = clock_type::now();
  bool ok = true;
  std::string ratios;
  double prev = oscillator_max_error(200);
  for (int n_t : {400, 800, 1600}) {
    const double cur = oscillator_max_error(n_t);
    const double ratio = prev / cur;
    ratios += fmt(" %.2f", ratio);
    ok = ok && ratio >= 4.0 * 0.85 && ratio <= 4.0 * 1.15;
    prev = cur;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 1.0;
  verdict(ok, 1, fmt("Newmark error ratios under step halving:%s (target 4 +/- 15%%), %.2f s",
                     ratios.c_str(), secs));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? argv[1] : "acceptance_work";
  fs::create_directories(work);
  std::printf("acceptance work directory: %s\n", fs::absolute(work).string().c_str());

  criterion_1();

  // ---- shared default-scale artifacts ----
  const Config cfg;  // defaults: h = 0.25, n_omega = 51
  const Library lib = Library::build(cfg);
  GreedyOptions greedy;
  greedy.eps = cfg.greedy_eps;
  greedy.max_picks = cfg.n_omega();
  greedy.n_cap = cfg.greedy_n_cap;

  OfflineCache cache;
  {
    const fs::path cache_file = work / "cache.bin";
    bool reused = false;
    if (fs::exists(cache_file)) {
      try {
        cache = load_offline_cache(cache_file, lib.hash);
        reused = true;
      } catch (const std::exception&) {
        reused = false;
      }
    }
    if (!reused) {
      cache = train_offline(lib);
      save_offline_cache(cache, cache_file);
    }
    std::printf("offline cache: %s (%.1f s offline stage, port sizes %d %d %d %d)\n",
                reused ? "reused" : "trained", cache.offline_seconds,
                static_cast<int>(cache.ports[0].modes.cols()),
                static_cast<int>(cache.ports[1].modes.cols()),
                static_cast<int>(cache.ports[2].modes.cols()),
                static_cast<int>(cache.ports[3].modes.cols()));
  }

  // ---- criterion 2: Richardson indicator target ----
  {
    const BridgeSystem sys = instantiate_system(example_parameter(cfg.bounds, 1), lib);
    const SensorSet sensors = resolve_sensors(sys, near_layout(cfg));
    const ReducedModel model =
        build_reduced_model(sys, cache, build_online_train_set(sys, 2), sensors, greedy);
    const RichardsonResult r =
        richardson_check(model, sys, 2500, cfg.richardson_tol, cfg.richardson_max_n_t);
    std::string hist;
    for (auto [nt, e] : r.history) hist += fmt(" (n_t=%d, %.2e)", nt, e);
    verdict(r.converged, 2,
            fmt("Richardson indicator%s, target <= %.0e at n_t <= %d", hist.c_str(),
                cfg.richardson_tol, cfg.richardson_max_n_t));
  }

  // ---- criteria 3-5: ROM accuracy, size, speedup ----
  {
    const auto t0 = clock_type::now();
    const int n_t = 2000;
    double worst = 0, worst_speedup = 1e30;
    bool ok = true;
    for (int k = 1; k <= 4; ++k) {
      const BridgeSystem sys = instantiate_system(example_parameter(cfg.bounds, k), lib);
      const SensorSet sensors = resolve_sensors(sys, near_layout(cfg));
      const RomFeComparison c = compare_rom_fe(sys, cache, sensors, greedy, n_t, 7000 + k);
      worst = std::max(worst, c.max_rel_err);
      worst_speedup = std::min(worst_speedup, c.speedup);
      ok = ok && c.max_rel_err < 0.01;
    }
    for (int k = 0; k < 5; ++k) {
      const BridgeSystem sys = instantiate_system(sample_parameter(cfg.bounds, 9100 + k), lib);
      const SensorSet sensors = resolve_sensors(sys, near_layout(cfg));
      const RomFeComparison c = compare_rom_fe(sys, cache, sensors, greedy, n_t, 7100 + k);
      worst = std::max(worst, c.max_rel_err);
      worst_speedup = std::min(worst_speedup, c.speedup);
      ok = ok && c.max_rel_err < 0.01;
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 3600;
    verdict(ok, 3,
            fmt("two-level vs FE max H1 relative error %.2e over 4 reference + 5 random "
                "parameters (target < 1e-2), %.0f s",
                worst, secs));
    verdict(worst_speedup >= 10.0, 5,
            fmt("online evaluation speedup vs full FE march: worst %.1fx (target >= 10x)",
                worst_speedup));
  }
  {
    double sum = 0;
    int n_min = 1 << 30, n_max = 0;
    bool each_ok = true;
    for (int k = 0; k < 10; ++k) {
      const BridgeSystem sys = instantiate_system(sample_parameter(cfg.bounds, 9200 + k), lib);
      const SensorSet sensors = resolve_sensors(sys, near_layout(cfg));
      const ReducedModel model =
          build_reduced_model(sys, cache, build_online_train_set(sys, 300 + k), sensors, greedy);
      sum += model.n();
      n_min = std::min(n_min, model.n());
      n_max = std::max(n_max, model.n());
      each_ok = each_ok && model.n() >= 10 && model.n() <= 51;
    }
    const double avg = sum / 10;
    verdict(each_ok && avg >= 20 && avg <= 40, 4,
            fmt("greedy basis sizes over 10 draws: min %d, max %d, average %.1f "
                "(target each in [10,51], average in [20,40])",
                n_min, n_max, avg));
  }

  // ---- criterion 6: EIM validation on a ten-times denser grid ----
  {
    const ArchetypeData& a = lib.of(kSpanLoaded);
    MovingLoad widest;
    widest.amplitude = 1.0;
    widest.sigma_x = cfg.bounds.sigma_x_max;
    widest.friction = 0.6;
    widest.d1 = widest.d2 = cfg.bounds.d_max;
    const double hi = cfg.bounds.d_max + 4 * cfg.bounds.sigma_x_max;
    const int n_train_pts =
        static_cast<int>(std::ceil(2 * hi / (cfg.bounds.sigma_x_min / cfg.eim_points_per_sigma)));
    std::vector<double> dense(10 * n_train_pts + 1);
    for (size_t i = 0; i < dense.size(); ++i)
      dense[i] = -hi + 2 * hi * static_cast<double>(i) / (dense.size() - 1);
    const double err = eim_validate(*a.eim, a.mesh, widest, dense,
                                    {cfg.bounds.sigma_x_min, 0.03, cfg.bounds.sigma_x_max},
                                    {cfg.bounds.friction_min, cfg.bounds.friction_max});
    verdict(err <= 1e-3, 6,
            fmt("EIM max relative load error on a 10x denser location grid: %.2e "
                "(target <= 1e-3, surrogate size %d)",
                err, a.eim->size()));
  }

  // ---- criterion 7: feature invariants ----
  {
    bool bound_ok = true, sym_ok = true, scale_ok = true;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 30; ++trial) {
      CorrelationInput in;
      in.component = 7;
      in.t_final = 1.5;
      in.n_sensors = 4;
      in.signals.resize(301, 8);
      for (Eigen::Index i = 0; i < in.signals.size(); ++i) in.signals.reshaped()(i) = dist(rng);
      const double tau = std::uniform_real_distribution<double>(0, in.t_final)(rng);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 2; ++k) {
            bound_ok = bound_ok && std::abs(correlation(in, i, j, k, k, tau)) <= 1.0;
            sym_ok = sym_ok && std::abs(correlation(in, i, j, k, k, 0.0) -
                                        correlation(in, j, i, k, k, 0.0)) <= 1e-12;
          }
      CorrelationInput scaled = in;
      scaled.signals *= 137.0;
      scale_ok = scale_ok && (ipv_feature(scaled) - ipv_feature(in)).cwiseAbs().maxCoeff() <=
                                 1e-12;
      scale_ok = scale_ok && (ipvx_feature(scaled) - ipvx_feature(in)).cwiseAbs().maxCoeff() <=
                                 1e-12;
    }
    verdict(bound_ok && sym_ok && scale_ok, 7,
            fmt("correlation bound |C|<=1 %s, tau=0 symmetry %s, feature scale invariance %s",
                bound_ok ? "holds" : "violated", sym_ok ? "holds" : "violated",
                scale_ok ? "holds" : "violated"));
  }

  // ---- criterion 8: classifier unit checks ----
  {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> dist;
    auto blobs = [&](int n, double margin, Eigen::MatrixXd& X, std::vector<int>& y) {
      X.resize(n, 2);
      y.resize(n);
      for (int i = 0; i < n; ++i) {
        const int cls = i % 2;
        X(i, 0) = dist(rng) + (cls ? margin : 0.0);
        X(i, 1) = dist(rng) + (cls ? margin : 0.0);
        y[i] = cls + 1;
      }
    };

    MlpClassifier probe;
    probe.W1.resize(10, 2);
    probe.b1.resize(10);
    probe.W2.resize(2, 10);
    probe.b2.resize(2);
    probe.feat_mean = Eigen::VectorXd::Zero(2);
    probe.feat_scale = Eigen::VectorXd::Ones(2);
    Eigen::MatrixXd Xg;
    std::vector<int> yg;
    blobs(30, 1.0, Xg, yg);
    std::vector<int> y01(yg.size());
    for (size_t i = 0; i < yg.size(); ++i) y01[i] = yg[i] - 1;
    Eigen::VectorXd params(52 + 10 + 12);
    params.resize(probe.W1.size() + probe.b1.size() + probe.W2.size() + probe.b2.size());
    for (Eigen::Index i = 0; i < params.size(); ++i) params[i] = 0.3 * dist(rng);
    Eigen::VectorXd grad;
    mlp_loss_grad(probe, params, Xg, y01, &grad);
    double grad_err = 0;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      Eigen::VectorXd p = params;
      p[i] += 1e-6;
      const double up = mlp_loss_grad(probe, p, Xg, y01, nullptr);
      p[i] -= 2e-6;
      const double dn = mlp_loss_grad(probe, p, Xg, y01, nullptr);
      grad_err = std::max(grad_err,
                          std::abs((up - dn) / 2e-6 - grad[i]) / std::max(1e-8, std::abs(grad[i])));
    }

    Eigen::MatrixXd Xs;
    std::vector<int> ys;
    blobs(200, 5.0, Xs, ys);
    MlpClassifier sep = train_classifier(Xs, ys, TrainConfig{}, 13);
    int miss = 0;
    for (int i = 0; i < Xs.rows(); ++i) miss += sep.predict(Xs.row(i)) != ys[i];

    Eigen::MatrixXd Xr;
    std::vector<int> yr;
    blobs(400, 5.0, Xr, yr);
    std::shuffle(yr.begin(), yr.end(), rng);
    MlpClassifier shuf = train_classifier(Xr, yr, TrainConfig{}, 19);

    const bool ok = grad_err <= 1e-5 && miss == 0 && shuf.val_accuracy >= 0.4 &&
                    shuf.val_accuracy <= 0.6;
    verdict(ok, 8,
            fmt("gradient check rel err %.2e (<=1e-5), separable-blob training errors %d (=0), "
                "shuffled-label validation accuracy %.2f (0.5 +/- 0.1)",
                grad_err, miss, shuf.val_accuracy));
  }

  // ---- criteria 9-10: classification studies on the synthetic dataset ----
  {
    const auto t0 = clock_type::now();
    DatasetOptions opts;
    opts.n_tt = 2000;
    opts.n_t = 1500;
    opts.seed = 424242;
    opts.n_cap = 15;
    opts.noise_levels = {0.0};
    opts.greedy = greedy;
    const fs::path ds = work / "dataset";
    bool have = false;
    if (fs::exists(ds / "dataset_manifest.json")) {
      try {
        const DatasetInfo info = read_dataset_info(ds);
        have = info.n_tt >= opts.n_tt && info.n_t == opts.n_t && info.seed == opts.seed &&
               info.library_hash == lib.hash && info.n_cap == opts.n_cap;
      } catch (const std::exception&) {
        have = false;
      }
    }
    if (!have) {
      std::printf("generating the classification dataset (%d samples)...\n", opts.n_tt);
      generate_dataset(lib, cache, opts, ds, true, [](int done, int total) {
        if (done % 200 == 0 || done == total) {
          std::printf("  %d/%d\n", done, total);
          std::fflush(stdout);
        }
      });
    } else {
      std::printf("classification dataset reused\n");
    }
    std::printf("dataset ready after %.0f s\n", seconds_since(t0));

    const auto near = load_dataset(ds, SensorChoice::Near);
    const auto far = load_dataset(ds, SensorChoice::Far);
    const auto far_cap = load_dataset(ds, SensorChoice::Far, true);

    auto study = [&](const std::vector<LabeledSample>& data, int n_tt, double sigma) {
      TTConfig tc;
      tc.n_tt = n_tt;
      tc.phi = 0.7;
      tc.n_part = 30;
      tc.sigma = sigma;
      tc.kind = FeatureKind::IPVx;
      tc.seed = 777;
      return tt_learning(data, tc);
    };
    using CR = ClassificationReport;

    // criterion 9: per-component mean error non-increasing in n_tt within a std
    {
      const std::vector<int> sizes = {250, 500, 1000, 2000};
      bool ok = true;
      std::string detail;
      for (double sigma : {0.0, 0.02}) {
        std::vector<std::array<double, 2>> means, stds;
        for (int n_tt : sizes) {
          const CR rep = study(near, n_tt, sigma);
          means.push_back({CR::mean(rep.err_comp[0]), CR::mean(rep.err_comp[1])});
          stds.push_back({CR::stddev(rep.err_comp[0]), CR::stddev(rep.err_comp[1])});
        }
        detail += fmt(" sigma=%g:", sigma);
        for (size_t i = 0; i < sizes.size(); ++i)
          detail += fmt(" %.4f/%.4f", means[i][0], means[i][1]);
        for (size_t i = 1; i < sizes.size(); ++i)
          for (int c = 0; c < 2; ++c)
            ok = ok && means[i][c] <= means[i - 1][c] + stds[i - 1][c] + 1e-12;
      }
      verdict(ok, 9,
              fmt("near-sensor IPVx mean errors over n_tt {250,500,1000,2000}%s "
                  "(non-increasing within one partition std)",
                  detail.c_str()));
    }

    // criterion 10: sensitivity orderings
    {
      const CR near_ref = study(near, 2000, 0.02);
      const CR far_ref = study(far, 2000, 0.02);
      bool far_ok = true;
      for (int c = 0; c < 2; ++c) {
        const double tol = std::max(CR::stddev(far_ref.err_comp[c]),
                                    CR::stddev(near_ref.err_comp[c]));
        far_ok = far_ok &&
                 CR::mean(far_ref.err_comp[c]) >= CR::mean(near_ref.err_comp[c]) - tol - 1e-12;
      }

      bool cap_ok = true;
      std::string cap_detail;
      for (int n_tt : {500, 2000})
        for (double sigma : {0.0, 0.02}) {
          const CR full = study(far, n_tt, sigma);
          const CR capped = study(far_cap, n_tt, sigma);
          for (int c = 0; c < 2; ++c) {
            const double tol =
                std::max(CR::stddev(full.err_comp[c]), CR::stddev(capped.err_comp[c]));
            cap_ok = cap_ok && CR::mean(capped.err_comp[c]) >=
                                   CR::mean(full.err_comp[c]) - tol - 1e-12;
          }
          cap_detail += fmt(" (%d,%g): %.4f vs %.4f;", n_tt, sigma,
                            CR::mean(capped.err_comp[0]) + CR::mean(capped.err_comp[1]),
                            CR::mean(full.err_comp[0]) + CR::mean(full.err_comp[1]));
        }

      verdict(far_ok && cap_ok, 10,
              fmt("sensitivity orderings within one partition std: far(%.4f/%.4f) vs "
                  "near(%.4f/%.4f) at sigma=0.02 n_tt=2000; basis capped at 15 vs full "
                  "(summed errors)%s",
                  CR::mean(far_ref.err_comp[0]), CR::mean(far_ref.err_comp[1]),
                  CR::mean(near_ref.err_comp[0]), CR::mean(near_ref.err_comp[1]),
                  cap_detail.c_str()));
    }
  }

  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
