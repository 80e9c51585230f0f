#include "prrbc/dataset.hpp"

#include <omp.h>

#include <json.hpp>

#include <chrono>
#include <cstring>
#include <fstream>

namespace prrbc {

namespace {

using nlohmann::json;

constexpr char kTrajMagic[8] = {'P', 'R', 'R', 'B', 'C', 'T', 'R', 'J'};
constexpr int kUnionSensors = 6;
constexpr int kSignalsPerComp = 2 * kUnionSensors;

struct TrajHeader {
  char magic[8];
  uint32_t version = 1;
  uint32_t n_t = 0;
  uint64_t library_hash = 0;
  uint64_t seed = 0;
  uint32_t n_cap = 0;
  uint32_t reserved = 0;
};

size_t record_bytes(int n_t) {
  return sizeof(uint64_t) * 2 + sizeof(int32_t) * 2 + sizeof(double) * (1 + 45) +
         sizeof(float) * 2 * (n_t + 1) * kSignalsPerComp;
}

void append_record(std::ofstream& out, const SampleRecord& rec,
                   const std::array<Eigen::MatrixXd, 2>& signals) {
  const uint64_t id = rec.id, seed = rec.seed;
  out.write(reinterpret_cast<const char*>(&id), sizeof id);
  out.write(reinterpret_cast<const char*>(&seed), sizeof seed);
  const int32_t labels[2] = {rec.mu.theta[0], rec.mu.theta[1]};
  out.write(reinterpret_cast<const char*>(labels), sizeof labels);
  out.write(reinterpret_cast<const char*>(&rec.t_final), sizeof rec.t_final);
  const Eigen::VectorXd mu = rec.mu.flatten();
  out.write(reinterpret_cast<const char*>(mu.data()), 45 * sizeof(double));
  for (const auto& sig : signals) {
    const Eigen::MatrixXf f = sig.cast<float>();
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(sizeof(float) * f.size()));
  }
}

struct RawSample {
  long id;
  uint64_t seed;
  std::array<int, 2> labels;
  double t_final;
  Eigen::VectorXd mu;
  std::array<Eigen::MatrixXd, 2> signals;
};

std::vector<RawSample> read_trajectories(const std::filesystem::path& file, int n_t, int limit) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  TrajHeader h;
  in.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!in || std::memcmp(h.magic, kTrajMagic, 8) != 0)
    throw std::runtime_error("not a trajectory file: " + file.string());
  if (n_t > 0 && static_cast<int>(h.n_t) != n_t)
    throw std::runtime_error("trajectory file has an unexpected time grid");
  std::vector<RawSample> out;
  while (limit < 0 || static_cast<int>(out.size()) < limit) {
    RawSample s;
    uint64_t id, seed;
    in.read(reinterpret_cast<char*>(&id), sizeof id);
    if (!in) break;
    in.read(reinterpret_cast<char*>(&seed), sizeof seed);
    int32_t labels[2];
    in.read(reinterpret_cast<char*>(labels), sizeof labels);
    in.read(reinterpret_cast<char*>(&s.t_final), sizeof s.t_final);
    s.mu.resize(45);
    in.read(reinterpret_cast<char*>(s.mu.data()), 45 * sizeof(double));
    for (auto& sig : s.signals) {
      Eigen::MatrixXf f(h.n_t + 1, kSignalsPerComp);
      in.read(reinterpret_cast<char*>(f.data()),
              static_cast<std::streamsize>(sizeof(float) * f.size()));
      sig = f.cast<double>();
    }
    if (!in) break;  // truncated tail record is dropped
    s.id = static_cast<long>(id);
    s.seed = seed;
    s.labels = {labels[0], labels[1]};
    out.push_back(std::move(s));
  }
  return out;
}

void write_feature_csvs(const std::filesystem::path& dir, const std::vector<RawSample>& samples,
                        const std::vector<double>& noise_levels, uint64_t seed,
                        const std::string& suffix) {
  struct Layout {
    const char* name;
    std::array<int, 4> sensors;
  };
  const Layout layouts[2] = {{"near", {0, 1, 4, 5}}, {"far", {2, 3, 4, 5}}};
  const FeatureKind kinds[2] = {FeatureKind::IPV, FeatureKind::IPVx};
  const char* kind_names[2] = {"ipv", "ipvx"};

  for (int ki = 0; ki < 2; ++ki)
    for (const Layout& lay : layouts)
      for (size_t ni = 0; ni < noise_levels.size(); ++ni) {
        const double sigma = noise_levels[ni];
        char sig_tag[32];
        std::snprintf(sig_tag, sizeof sig_tag, "%g", sigma);
        const auto path = dir / ("features_" + std::string(kind_names[ki]) + "_" + lay.name +
                                 "_sigma" + sig_tag + suffix + ".csv");
        std::ofstream out(path);
        out.precision(12);
        const int n_feat = (ki == 0 ? 2 : 1) * 16;
        out << "id,seed";
        for (int p = 0; p < 45; ++p) out << ",mu" << p;
        out << ",label_8,label_16";
        for (int c = 0; c < 2; ++c)
          for (int f = 0; f < n_feat; ++f) out << ",c" << (c == 0 ? 8 : 16) << "_f" << f;
        out << "\n";
        for (const RawSample& s : samples) {
          out << s.id << "," << s.seed;
          for (int p = 0; p < 45; ++p) out << "," << s.mu[p];
          out << "," << s.labels[0] << "," << s.labels[1];
          for (int c = 0; c < 2; ++c) {
            CorrelationInput in;
            in.component = c == 0 ? 7 : 15;
            in.t_final = s.t_final;
            in.n_sensors = 4;
            in.signals.resize(s.signals[c].rows(), 8);
            for (int k = 0; k < 4; ++k) {
              in.signals.col(k) = s.signals[c].col(lay.sensors[k]);
              in.signals.col(4 + k) = s.signals[c].col(kUnionSensors + lay.sensors[k]);
            }
            if (sigma > 0)
              in = add_noise(in, sigma, fnv1a64(&s.id, sizeof s.id, seed + 997 * (ni + 1) + c));
            const Eigen::VectorXd feat = feature_of(in, kinds[ki]);
            for (int f = 0; f < feat.size(); ++f) out << "," << feat[f];
          }
          out << "\n";
        }
      }
}

void write_maxima_csv(const std::filesystem::path& dir, const std::vector<RawSample>& samples) {
  std::ofstream out(dir / "signal_maxima.csv");
  out.precision(12);
  out << "id";
  for (int c = 0; c < 2; ++c)
    for (int k = 0; k < kSignalsPerComp; ++k) out << ",c" << (c == 0 ? 8 : 16) << "_s" << k;
  out << "\n";
  for (const RawSample& s : samples) {
    out << s.id;
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < kSignalsPerComp; ++k)
        out << "," << s.signals[c].col(k).cwiseAbs().maxCoeff();
    out << "\n";
  }
}

}  // namespace

SampleRecord simulate_sample(const Library& lib, const OfflineCache& cache, long id,
                             uint64_t master_seed, int n_t, GreedyOptions greedy, int n_cap) {
  SampleRecord rec;
  rec.id = id;
  rec.seed = fnv1a64(&id, sizeof id, master_seed);
  rec.mu = sample_parameter(lib.cfg.bounds, rec.seed);
  const BridgeSystem sys = instantiate_system(rec.mu, lib);
  rec.t_final = sys.schedule.t_final;

  const SensorSet sensors = resolve_sensors(sys, union_layout(lib.cfg));
  const OnlineTrainSet ts = build_online_train_set(sys, rec.seed ^ 0x9e3779b97f4a7c15ull);
  const ReducedModel model = build_reduced_model(sys, cache, ts, sensors, greedy, false);
  rec.model_n = model.n();

  const SensorTrajectory q = reduced_march(model, sys, n_t);
  rec.signals[0] = q.q.leftCols(kSignalsPerComp);
  rec.signals[1] = q.q.rightCols(kSignalsPerComp);
  if (n_cap > 0) {
    const SensorTrajectory qc = reduced_march(model.truncated(n_cap), sys, n_t);
    rec.signals_cap[0] = qc.q.leftCols(kSignalsPerComp);
    rec.signals_cap[1] = qc.q.rightCols(kSignalsPerComp);
  }
  return rec;
}

DatasetInfo generate_dataset(const Library& lib, const OfflineCache& cache,
                             const DatasetOptions& opts, const std::filesystem::path& dir,
                             bool parallel, const std::function<void(int, int)>& progress) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(dir);
  const auto main_partial = dir / "trajectories.bin.partial";
  const auto main_final = dir / "trajectories.bin";
  const auto cap_partial = dir / "trajectories_cap.bin.partial";
  const auto cap_final = dir / "trajectories_cap.bin";

  auto open_append = [&](const std::filesystem::path& partial,
                         const std::filesystem::path& final_path, int& have) {
    have = 0;
    if (std::filesystem::exists(final_path)) {
      have = static_cast<int>(read_trajectories(final_path, opts.n_t, -1).size());
      std::filesystem::rename(final_path, partial);
    } else if (opts.resume && std::filesystem::exists(partial)) {
      // keep whole records only; a truncated tail is discarded
      const auto have_samples = read_trajectories(partial, opts.n_t, -1);
      have = static_cast<int>(have_samples.size());
      std::filesystem::resize_file(
          partial, sizeof(TrajHeader) + have * record_bytes(opts.n_t));
    } else {
      std::ofstream out(partial, std::ios::binary | std::ios::trunc);
      TrajHeader h{};
      std::memcpy(h.magic, kTrajMagic, 8);
      h.version = 1;
      h.n_t = static_cast<uint32_t>(opts.n_t);
      h.library_hash = lib.hash;
      h.seed = opts.seed;
      h.n_cap = static_cast<uint32_t>(opts.n_cap);
      out.write(reinterpret_cast<const char*>(&h), sizeof h);
    }
  };

  int have_main = 0, have_cap = 0;
  open_append(main_partial, main_final, have_main);
  if (opts.n_cap > 0) open_append(cap_partial, cap_final, have_cap);
  int next = std::min(have_main, opts.n_cap > 0 ? have_cap : have_main);
  // both files must stay in lockstep; restart the shorter one from the
  // common prefix
  std::filesystem::resize_file(main_partial, sizeof(TrajHeader) + next * record_bytes(opts.n_t));
  if (opts.n_cap > 0)
    std::filesystem::resize_file(cap_partial, sizeof(TrajHeader) + next * record_bytes(opts.n_t));

  std::ofstream main_out(main_partial, std::ios::binary | std::ios::app);
  std::ofstream cap_out;
  if (opts.n_cap > 0) cap_out.open(cap_partial, std::ios::binary | std::ios::app);

  const int chunk = std::max(1, 2 * omp_get_max_threads());
  std::exception_ptr failure;
  while (next < opts.n_tt) {
    const int hi = std::min(opts.n_tt, next + chunk);
    std::vector<SampleRecord> buffer(hi - next);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int i = 0; i < hi - next; ++i) {
      try {
        buffer[i] = simulate_sample(lib, cache, next + i, opts.seed, opts.n_t, opts.greedy,
                                    opts.n_cap);
      } catch (...) {
#pragma omp critical
        failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (auto& rec : buffer) {
      append_record(main_out, rec, rec.signals);
      if (opts.n_cap > 0) append_record(cap_out, rec, rec.signals_cap);
    }
    main_out.flush();
    if (opts.n_cap > 0) cap_out.flush();
    next = hi;
    if (progress) progress(next, opts.n_tt);
  }
  main_out.close();
  if (opts.n_cap > 0) cap_out.close();
  std::filesystem::rename(main_partial, main_final);
  if (opts.n_cap > 0) std::filesystem::rename(cap_partial, cap_final);

  const auto samples = read_trajectories(main_final, opts.n_t, -1);
  write_feature_csvs(dir, samples, opts.noise_levels, opts.seed, "");
  write_maxima_csv(dir, samples);
  if (opts.n_cap > 0) {
    const auto degraded = read_trajectories(cap_final, opts.n_t, -1);
    write_feature_csvs(dir, degraded, opts.noise_levels, opts.seed, "_cap");
  }

  DatasetInfo info;
  info.n_tt = opts.n_tt;
  info.n_t = opts.n_t;
  info.seed = opts.seed;
  info.library_hash = lib.hash;
  info.n_cap = opts.n_cap;
  info.generation_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest{{"complete", true},
                {"n_tt", info.n_tt},
                {"n_t", info.n_t},
                {"seed", info.seed},
                {"library_hash", info.library_hash},
                {"n_cap", info.n_cap},
                {"generation_seconds", info.generation_seconds},
                {"files", {"trajectories.bin", "signal_maxima.csv"}}};
  std::ofstream(dir / "dataset_manifest.json") << manifest.dump(2) << "\n";
  return info;
}

DatasetInfo read_dataset_info(const std::filesystem::path& dir) {
  std::ifstream in(dir / "dataset_manifest.json");
  if (!in) throw std::runtime_error("dataset manifest missing in " + dir.string());
  json j = json::parse(in);
  DatasetInfo info;
  info.n_tt = j.value("n_tt", 0);
  info.n_t = j.value("n_t", 0);
  info.seed = j.value("seed", 0ull);
  info.library_hash = j.value("library_hash", 0ull);
  info.n_cap = j.value("n_cap", 0);
  info.generation_seconds = j.value("generation_seconds", 0.0);
  return info;
}

std::vector<LabeledSample> load_dataset(const std::filesystem::path& dir, SensorChoice choice,
                                        bool degraded) {
  const auto file = dir / (degraded ? "trajectories_cap.bin" : "trajectories.bin");
  const auto raw = read_trajectories(file, 0, -1);
  const std::array<int, 4> sel =
      choice == SensorChoice::Near ? std::array<int, 4>{0, 1, 4, 5} : std::array<int, 4>{2, 3, 4, 5};
  std::vector<LabeledSample> out(raw.size());
  for (size_t s = 0; s < raw.size(); ++s) {
    LabeledSample& smp = out[s];
    smp.id = raw[s].id;
    smp.seed = raw[s].seed;
    smp.labels = raw[s].labels;
    smp.parameters = raw[s].mu;
    for (int c = 0; c < 2; ++c) {
      CorrelationInput& in = smp.signals[c];
      in.component = c == 0 ? 7 : 15;
      in.t_final = raw[s].t_final;
      in.n_sensors = 4;
      in.signals.resize(raw[s].signals[c].rows(), 8);
      for (int k = 0; k < 4; ++k) {
        in.signals.col(k) = raw[s].signals[c].col(sel[k]);
        in.signals.col(4 + k) = raw[s].signals[c].col(kUnionSensors + sel[k]);
      }
    }
  }
  return out;
}

}  // namespace prrbc
