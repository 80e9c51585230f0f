#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "prrbc/dataset.hpp"
#include "prrbc/io.hpp"

using namespace prrbc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "prrbc 0.1.0";

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

struct ManifestWriter {
  json j;
  fs::path dir;
  ManifestWriter(const fs::path& out_dir, const std::string& command, const Config& cfg) {
    dir = out_dir;
    fs::create_directories(dir);
    j["command"] = command;
    j["version"] = kVersion;
    j["started"] = timestamp();
    j["config_hash"] = cfg.config_hash();
    j["library_hash"] = cfg.library_hash();
    j["artifacts"] = json::array();
    cfg.save((dir / "config_echo.json").string());
    j["artifacts"].push_back("config_echo.json");
  }
  void artifact(const std::string& name) { j["artifacts"].push_back(name); }
  void finish(const std::string& name = "manifest.json") {
    j["finished"] = timestamp();
    std::ofstream(dir / name) << j.dump(2) << "\n";
  }
};

Config load_config(const std::string& path, bool smoke) {
  if (!path.empty()) return Config::load(path);
  return smoke ? Config::smoke() : Config{};
}

GreedyOptions greedy_of(const Config& cfg) {
  GreedyOptions g;
  g.eps = cfg.greedy_eps;
  g.max_picks = cfg.n_omega();
  g.n_cap = cfg.greedy_n_cap;
  return g;
}

// build or reuse the offline cache artifact under cache_dir
OfflineCache obtain_cache(const Library& lib, const fs::path& cache_dir, bool allow_reuse,
                          bool verbose) {
  const fs::path file = cache_dir / "cache.bin";
  if (allow_reuse && fs::exists(file)) {
    try {
      OfflineCache cache = load_offline_cache(file, lib.hash);
      if (verbose) std::cout << "offline cache reused (hash hit): " << file << "\n";
      return cache;
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(e.what()) +
                               " (re-run the offline command to rebuild)");
    }
  }
  OfflineCache cache = train_offline(lib, verbose);
  fs::create_directories(cache_dir);
  save_offline_cache(cache, file);
  return cache;
}

std::vector<SensorSpec> layout_by_name(const Config& cfg, const std::string& name) {
  if (name == "near") return near_layout(cfg);
  if (name == "far") return far_layout(cfg);
  if (name == "union") return union_layout(cfg);
  throw CLI::ValidationError("--layout must be near, far or union");
}

int cmd_offline(const std::string& config_path, bool smoke, const std::string& out,
                bool force, const std::string& dump_meshes) {
  const Config cfg = load_config(config_path, smoke);
  ManifestWriter manifest(out, "offline", cfg);
  const Library lib = Library::build(cfg);

  if (!dump_meshes.empty()) {
    fs::create_directories(dump_meshes);
    static const char* names[] = {"abutment_left", "tee", "span", "span_loaded",
                                  "span_cracked", "abutment_right"};
    for (int a = 0; a < kNumArchetypes; ++a) {
      std::ofstream os(fs::path(dump_meshes) / (std::string(names[a]) + ".txt"));
      dump_mesh(lib.of(a).mesh, os);
    }
  }

  const OfflineCache cache = obtain_cache(lib, out, !force, true);
  std::cout << "library hash: " << std::hex << lib.hash << std::dec << "\n";
  std::cout << "training set size (frequencies): " << cfg.n_omega() << "\n";
  for (int r = 0; r < kNumRefPorts; ++r)
    std::cout << "port space " << r + 1 << ": " << cache.ports[r].modes.cols()
              << " modes (retained energy " << cache.ports[r].retained_energy << ")\n";
  std::cout << "lifting bubbles per port mode: " << cfg.lifting_bubbles << "\n";
  std::cout << "inhomogeneity bubbles (loaded archetypes): " << cfg.inhomogeneity_bubbles
            << "\n";
  std::cout << "largest FE system assembled: " << cache.max_assembled_dofs << " dofs\n";
  std::cout << "offline wall time: " << cache.offline_seconds << " s\n";
  manifest.artifact("cache.bin");
  manifest.finish();
  return 0;
}

int cmd_simulate(const std::string& config_path, bool smoke, const std::string& cache_dir,
                 const std::string& out, uint64_t seed, int example, bool fe_truth, int n_cap,
                 int n_t_arg, const std::string& layout_name) {
  const Config cfg = load_config(config_path, smoke);
  ManifestWriter manifest(out, "simulate", cfg);
  const Library lib = Library::build(cfg);
  const OfflineCache cache = obtain_cache(lib, cache_dir.empty() ? out : cache_dir, true, false);

  const GlobalParameter mu = example > 0 ? example_parameter(cfg.bounds, example)
                                         : sample_parameter(cfg.bounds, seed);
  const BridgeSystem sys = instantiate_system(mu, lib);
  const SensorSet sensors = resolve_sensors(sys, layout_by_name(cfg, layout_name));
  const int n_t = n_t_arg > 0 ? n_t_arg : cfg.n_t;

  GreedyOptions greedy = greedy_of(cfg);
  if (n_cap > 0) greedy.n_cap = n_cap;

  if (fe_truth) {
    const RomFeComparison cmp = compare_rom_fe(sys, cache, sensors, greedy, n_t, seed + 1);
    std::cout << "reduced dimension N = " << cmp.n << "\n"
              << "max-over-time relative H1 error vs FE: " << cmp.max_rel_err << "\n"
              << "two-level online time: " << cmp.rom_seconds << " s\n"
              << "full FE march time:   " << cmp.fe_seconds << " s\n"
              << "speedup: " << cmp.speedup << "x\n";
    write_sensor_csv(cmp.rom_sensors, sensors, fs::path(out) / "sensors.csv");
    save_sensor_output(cmp.rom_sensors, cache, fs::path(out) / "sensors.bin");
    manifest.j["fe_truth"] = {{"max_rel_err", cmp.max_rel_err},
                              {"speedup", cmp.speedup},
                              {"n", cmp.n}};
  } else {
    const OnlineTrainSet ts = build_online_train_set(sys, seed + 1);
    const ReducedModel model = build_reduced_model(sys, cache, ts, sensors, greedy);
    const SensorTrajectory traj = reduced_march(model, sys, n_t);
    std::cout << "reduced dimension N = " << model.n() << " (" << model.greedy_ratios.size()
              << " greedy picks)\n";
    write_sensor_csv(traj, sensors, fs::path(out) / "sensors.csv");
    save_sensor_output(traj, cache, fs::path(out) / "sensors.bin");
    save_reduced_model(model, cache, fs::path(out) / "model.bin");
    manifest.artifact("model.bin");
  }
  manifest.j["seed"] = seed;
  manifest.j["example"] = example;
  manifest.artifact("sensors.csv");
  manifest.artifact("sensors.bin");
  manifest.finish();
  return 0;
}

int cmd_dataset(const std::string& config_path, bool smoke, const std::string& cache_dir,
                const std::string& out, int n_tt, uint64_t seed, int n_t_arg, int n_cap,
                const std::vector<double>& noise, int workers, bool no_resume) {
  const Config cfg = load_config(config_path, smoke);
  if (workers > 0) omp_set_num_threads(workers);
  ManifestWriter manifest(out, "dataset", cfg);
  const Library lib = Library::build(cfg);
  const OfflineCache cache = obtain_cache(lib, cache_dir.empty() ? out : cache_dir, true, false);

  DatasetOptions opts;
  opts.n_tt = n_tt;
  opts.n_t = n_t_arg > 0 ? n_t_arg : 1500;
  opts.seed = seed;
  opts.n_cap = n_cap;
  if (!noise.empty()) opts.noise_levels = noise;
  opts.greedy = greedy_of(cfg);
  opts.resume = !no_resume;

  const DatasetInfo info =
      generate_dataset(lib, cache, opts, out, true, [](int done, int total) {
        if (done % 25 == 0 || done == total)
          std::cout << "dataset: " << done << "/" << total << " samples\n" << std::flush;
      });
  std::cout << "dataset complete: " << info.n_tt << " samples in " << info.generation_seconds
            << " s\n";
  manifest.artifact("trajectories.bin");
  manifest.artifact("dataset_manifest.json");
  manifest.finish();
  return 0;
}

int cmd_evaluate(const std::string& dataset_dir, const std::string& out,
                 std::vector<int> n_tt_list, std::vector<double> sigma_list,
                 const std::string& layout_name, const std::string& kind_name, int n_part,
                 double phi, uint64_t seed, bool degraded) {
  const DatasetInfo info = read_dataset_info(dataset_dir);
  fs::create_directories(out);

  const SensorChoice choice = layout_name == "far" ? SensorChoice::Far : SensorChoice::Near;
  if (layout_name != "far" && layout_name != "near")
    throw CLI::ValidationError("--layout must be near or far for evaluation");
  const FeatureKind kind = kind_name == "ipv" ? FeatureKind::IPV : FeatureKind::IPVx;
  if (n_tt_list.empty()) n_tt_list = {info.n_tt};
  if (sigma_list.empty()) sigma_list = {0.0, 0.02};

  const auto samples = load_dataset(dataset_dir, choice, degraded);
  json report;
  report["dataset"] = dataset_dir;
  report["layout"] = layout_name;
  report["kind"] = kind_name;
  report["phi"] = phi;
  report["n_part"] = n_part;
  report["degraded"] = degraded;
  report["cells"] = json::array();

  std::ofstream csv(fs::path(out) / ("errors_" + kind_name + "_" + layout_name +
                                     (degraded ? "_cap" : "") + ".csv"));
  csv.precision(10);
  csv << "n_tt,sigma,err8_mean,err8_std,err16_mean,err16_std,err_binary_mean,err_binary_std,"
         "err_state_mean,err_state_std,one_point_reference\n";

  for (int n_tt : n_tt_list) {
    if (n_tt > static_cast<int>(samples.size()))
      throw std::runtime_error("grid cell exceeds the dataset size");
    for (double sigma : sigma_list) {
      TTConfig cfg;
      cfg.n_tt = n_tt;
      cfg.phi = phi;
      cfg.n_part = n_part;
      cfg.sigma = sigma;
      cfg.kind = kind;
      cfg.seed = seed;
      const ClassificationReport rep = tt_learning(samples, cfg);
      const double ref = 1.0 / ((1.0 - phi) * n_tt);
      using CR = ClassificationReport;
      csv << n_tt << "," << sigma << "," << CR::mean(rep.err_comp[0]) << ","
          << CR::stddev(rep.err_comp[0]) << "," << CR::mean(rep.err_comp[1]) << ","
          << CR::stddev(rep.err_comp[1]) << "," << CR::mean(rep.err_binary) << ","
          << CR::stddev(rep.err_binary) << "," << CR::mean(rep.err_state) << ","
          << CR::stddev(rep.err_state) << "," << ref << "\n";
      json cell{{"n_tt", n_tt},
                {"sigma", sigma},
                {"one_point_reference", ref},
                {"resampled_partitions", rep.resampled_partitions},
                {"err_component8", rep.err_comp[0]},
                {"err_component16", rep.err_comp[1]},
                {"err_binary", rep.err_binary},
                {"err_state", rep.err_state}};
      report["cells"].push_back(std::move(cell));
      std::cout << "n_tt=" << n_tt << " sigma=" << sigma
                << " err8=" << CR::mean(rep.err_comp[0])
                << " err16=" << CR::mean(rep.err_comp[1])
                << " err_state=" << CR::mean(rep.err_state) << "\n";
    }
  }
  std::ofstream(fs::path(out) / ("report_" + kind_name + "_" + layout_name +
                                 (degraded ? "_cap" : "") + ".json"))
      << report.dump(2) << "\n";
  return 0;
}

int cmd_fe_check(const std::string& config_path, bool smoke, const std::string& cache_dir,
                 int n_random, int n_t_arg, uint64_t seed) {
  const Config cfg = load_config(config_path, smoke);
  const Library lib = Library::build(cfg);
  const OfflineCache cache =
      obtain_cache(lib, cache_dir.empty() ? "fe-check-cache" : cache_dir, true, false);
  const int n_t = n_t_arg > 0 ? n_t_arg : 2000;

  double worst = 0;
  auto run = [&](const GlobalParameter& mu, const std::string& name, uint64_t s) {
    const BridgeSystem sys = instantiate_system(mu, lib);
    const SensorSet sensors = resolve_sensors(sys, near_layout(cfg));
    const RomFeComparison cmp = compare_rom_fe(sys, cache, sensors, greedy_of(cfg), n_t, s);
    std::cout << name << ": N=" << cmp.n << " rel_err=" << cmp.max_rel_err
              << " speedup=" << cmp.speedup << "x\n";
    worst = std::max(worst, cmp.max_rel_err);
  };
  for (int k = 1; k <= 4; ++k)
    run(example_parameter(cfg.bounds, k), "example " + std::to_string(k), seed + k);
  for (int k = 0; k < n_random; ++k)
    run(sample_parameter(cfg.bounds, seed + 100 + k), "random " + std::to_string(k),
        seed + 200 + k);
  std::cout << "worst relative error: " << worst << "\n";
  return worst < 0.01 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"component-based model reduction and crack classification for a multi-span "
               "bridge under a moving vehicle"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path, cache_dir, out = "out", dump_meshes, layout = "near",
              kind = "ipvx", dataset_dir;
  bool smoke = false, force = false, fe_truth = false, no_resume = false, degraded = false;
  uint64_t seed = 1;
  int example = 0, n_cap = 0, n_t = 0, n_tt = 100, workers = 0, n_random = 5, n_part = 30;
  double phi = 0.7;
  std::vector<double> noise;
  std::vector<int> n_tt_list;
  std::vector<double> sigma_list;

  auto add_common = [&](CLI::App* cmd, bool with_cache) {
    cmd->add_option("--config", config_path, "configuration file (JSON)");
    cmd->add_flag("--smoke", smoke, "use the built-in coarse configuration");
    cmd->add_option("--out", out, "output directory");
    if (with_cache) cmd->add_option("--cache", cache_dir, "offline cache directory");
  };

  CLI::App* offline = app.add_subcommand("offline", "train the reduced-basis library once");
  add_common(offline, false);
  offline->add_flag("--force", force, "retrain even if a matching cache exists");
  offline->add_option("--dump-meshes", dump_meshes, "write plain-text mesh listings here");

  CLI::App* simulate = app.add_subcommand("simulate", "one two-level simulation");
  add_common(simulate, true);
  simulate->add_option("--seed", seed, "parameter seed");
  simulate->add_option("--example", example, "use reference case 1..4 instead of a seed")
      ->check(CLI::Range(1, 4));
  simulate->add_flag("--fe-truth", fe_truth, "also run the full FE march and compare");
  simulate->add_option("--n-cap", n_cap, "cap the reduced dimension (degraded accuracy)");
  simulate->add_option("--n-t", n_t, "number of time steps");
  simulate->add_option("--layout", layout, "sensor layout: near | far | union");

  CLI::App* dataset = app.add_subcommand("dataset", "generate a synthetic train-test dataset");
  add_common(dataset, true);
  dataset->add_option("--n-tt", n_tt, "dataset size")->required();
  dataset->add_option("--seed", seed, "master seed");
  dataset->add_option("--n-t", n_t, "time steps per simulation");
  dataset->add_option("--n-cap", n_cap, "also emit a degraded variant with this basis cap");
  dataset->add_option("--noise", noise, "noise factors for feature CSV snapshots");
  dataset->add_option("--workers", workers, "worker threads");
  dataset->add_flag("--no-resume", no_resume, "ignore a partial run");

  CLI::App* evaluate = app.add_subcommand("evaluate", "train-test classification study");
  evaluate->add_option("--dataset", dataset_dir, "dataset directory")->required();
  evaluate->add_option("--out", out, "output directory");
  evaluate->add_option("--n-tt", n_tt_list, "dataset sizes to evaluate");
  evaluate->add_option("--sigma", sigma_list, "test noise factors");
  evaluate->add_option("--layout", layout, "sensor layout: near | far");
  evaluate->add_option("--kind", kind, "feature kind: ipv | ipvx");
  evaluate->add_option("--n-part", n_part, "random partitions per cell");
  evaluate->add_option("--phi", phi, "train fraction");
  evaluate->add_option("--seed", seed, "partition seed");
  evaluate->add_flag("--degraded", degraded, "use the degraded-accuracy trajectories");

  CLI::App* fe_check = app.add_subcommand("fe-check", "verify the reduction against full FE");
  add_common(fe_check, true);
  fe_check->add_option("--n-random", n_random, "random parameters on top of the 4 cases");
  fe_check->add_option("--n-t", n_t, "time steps");
  fe_check->add_option("--seed", seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (offline->parsed()) return cmd_offline(config_path, smoke, out, force, dump_meshes);
    if (simulate->parsed())
      return cmd_simulate(config_path, smoke, cache_dir, out, seed, example, fe_truth, n_cap,
                          n_t, layout);
    if (dataset->parsed())
      return cmd_dataset(config_path, smoke, cache_dir, out, n_tt, seed, n_t, n_cap, noise,
                         workers, no_resume);
    if (evaluate->parsed())
      return cmd_evaluate(dataset_dir, out, n_tt_list, sigma_list, layout, kind, n_part, phi,
                          seed, degraded);
    if (fe_check->parsed())
      return cmd_fe_check(config_path, smoke, cache_dir, n_random, n_t, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
