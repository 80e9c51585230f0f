// Timing comparison of the OpenMP kernels against their serial references:
// element assembly, the signal Gram behind the features, and the Level-1
// frequency sweep.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>

#include "prrbc/dataset.hpp"
#include "prrbc/rom_online.hpp"

using namespace prrbc;
using clock_type = std::chrono::steady_clock;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    f();
    best = std::min(best, std::chrono::duration<double>(clock_type::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-24s serial %8.4f s   parallel %8.4f s   speedup %.2fx\n", name, serial,
              parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  {
    ComponentGeometry g;
    g.kind = ComponentKind::Rect;
    g.length = 60;
    g.thickness = 1;
    const ComponentMesh mesh = generate_component_mesh(g, 0.05);
    std::printf("assembly mesh: %zu triangles\n", mesh.tris.size());
    const double s =
        time_best_of(3, [&] { assemble_operators_serial(mesh, 2400.0, 0.15); });
    const double p = time_best_of(3, [&] { assemble_operators(mesh, 2400.0, 0.15, true); });
    report("element assembly", s, p);
  }

  {
    CorrelationInput in;
    in.component = 0;
    in.t_final = 1.0;
    in.n_sensors = 48;
    in.signals.resize(20001, 96);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist;
    for (Eigen::Index i = 0; i < in.signals.size(); ++i) in.signals.reshaped()(i) = dist(rng);
    const double s = time_best_of(3, [&] { signal_gram_serial(in); });
    const double p = time_best_of(3, [&] { signal_gram(in, true); });
    report("signal gram", s, p);
  }

  {
    const Library lib = Library::build(Config::smoke());
    const OfflineCache cache = train_offline(lib);
    const BridgeSystem sys = instantiate_system(example_parameter(lib.cfg.bounds, 2), lib);
    const OnlineTrainSet ts = build_online_train_set(sys, 7);
    const double s = time_best_of(3, [&] { level1_sweep(sys, cache, ts, false); });
    const double p = time_best_of(3, [&] { level1_sweep(sys, cache, ts, true); });
    report("level-1 sweep", s, p);
  }
  return 0;
}
