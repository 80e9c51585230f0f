#ifndef PRRBC_DATASET_HPP
#define PRRBC_DATASET_HPP

#include <filesystem>
#include <functional>
#include <optional>

#include "prrbc/classify.hpp"
#include "prrbc/io.hpp"

namespace prrbc {

// Synthetic train-test dataset: every sample records the trajectories of the
// union sensor layout (near-top, far-top and bottom pairs per damageable
// component), so both sensor configurations can be studied from one run.
struct DatasetOptions {
  int n_tt = 100;
  int n_t = 1500;
  uint64_t seed = 1;
  int n_cap = 0;  // also emit a degraded-accuracy variant when positive
  std::vector<double> noise_levels = {0.0};  // feature CSV snapshots
  GreedyOptions greedy;
  bool resume = true;
};

enum class SensorChoice { Near, Far };

struct DatasetInfo {
  int n_tt = 0;
  int n_t = 0;
  uint64_t seed = 0;
  uint64_t library_hash = 0;
  int n_cap = 0;
  double generation_seconds = 0;
};

// Generates (or resumes) the dataset under dir: trajectories.bin
// (+ trajectories_cap.bin), feature CSVs per (kind, layout, noise level),
// per-signal maxima and the manifest.
DatasetInfo generate_dataset(const Library& lib, const OfflineCache& cache,
                             const DatasetOptions& opts, const std::filesystem::path& dir,
                             bool parallel = true,
                             const std::function<void(int, int)>& progress = {});

DatasetInfo read_dataset_info(const std::filesystem::path& dir);

std::vector<LabeledSample> load_dataset(const std::filesystem::path& dir, SensorChoice choice,
                                        bool degraded = false);

// One simulated sample (exposed for the single-run command).
struct SampleRecord {
  long id = 0;
  uint64_t seed = 0;
  GlobalParameter mu;
  double t_final = 0;
  // per damageable component: (n_t+1) x 12 union-sensor signals
  std::array<Eigen::MatrixXd, 2> signals;
  std::array<Eigen::MatrixXd, 2> signals_cap;  // empty unless n_cap > 0
  int model_n = 0;
};

SampleRecord simulate_sample(const Library& lib, const OfflineCache& cache, long id,
                             uint64_t master_seed, int n_t, GreedyOptions greedy, int n_cap);

}  // namespace prrbc

#endif
