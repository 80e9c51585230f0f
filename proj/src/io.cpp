#include "prrbc/io.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

#include "prrbc/config.hpp"

namespace prrbc {

namespace {

constexpr char kMagic[8] = {'P', 'R', 'R', 'B', 'C', 'A', 'R', 'T'};

class ArtifactWriter {
 public:
  explicit ArtifactWriter(const OfflineCache& header) {
    raw(kMagic, sizeof kMagic);
    put<uint32_t>(kArtifactVersion);
    put<uint64_t>(header.library_hash);
    put<double>(header.mesh_h);
    put<int32_t>(header.c_lower);
    put<int32_t>(header.c_upper);
    put<double>(header.sigma_t_ref);
  }

  void section(const std::string& name, const Eigen::MatrixXd& m) {
    put<uint32_t>(static_cast<uint32_t>(name.size()));
    raw(name.data(), name.size());
    put<uint64_t>(static_cast<uint64_t>(m.rows()));
    put<uint64_t>(static_cast<uint64_t>(m.cols()));
    raw(m.data(), sizeof(double) * m.size());
  }

  void section(const std::string& name, const Eigen::VectorXd& v) {
    section(name, Eigen::MatrixXd(v));
  }

  void write(const std::filesystem::path& path) {
    put<uint32_t>(0);  // empty name terminates the section list
    const uint64_t checksum = fnv1a64(bytes_.data(), bytes_.size());
    put<uint64_t>(checksum);
    const auto tmp = path.string() + ".partial";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write artifact: " + path.string());
      out.write(bytes_.data(), static_cast<std::streamsize>(bytes_.size()));
    }
    std::filesystem::rename(tmp, path);
  }

 private:
  template <typename T>
  void put(T v) {
    raw(&v, sizeof v);
  }
  void raw(const void* p, size_t n) {
    const char* c = static_cast<const char*>(p);
    bytes_.insert(bytes_.end(), c, c + n);
  }
  std::vector<char> bytes_;
};

class ArtifactReader {
 public:
  explicit ArtifactReader(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open artifact: " + path.string());
    bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (bytes_.size() < sizeof kMagic + 8) throw std::runtime_error("artifact truncated");
    const uint64_t stored = peek_u64(bytes_.size() - 8);
    const uint64_t computed = fnv1a64(bytes_.data(), bytes_.size() - 8);
    if (stored != computed)
      throw std::runtime_error("artifact checksum mismatch: " + path.string());
    if (std::memcmp(bytes_.data(), kMagic, sizeof kMagic) != 0)
      throw std::runtime_error("not a prrbc artifact: " + path.string());
    at_ = sizeof kMagic;
    version = take<uint32_t>();
    if (version != kArtifactVersion) throw std::runtime_error("unsupported artifact version");
    library_hash = take<uint64_t>();
    mesh_h = take<double>();
    c_lower = take<int32_t>();
    c_upper = take<int32_t>();
    sigma_t_ref = take<double>();
    while (true) {
      const uint32_t len = take<uint32_t>();
      if (len == 0) break;
      std::string name(bytes_.data() + at_, len);
      at_ += len;
      const uint64_t rows = take<uint64_t>();
      const uint64_t cols = take<uint64_t>();
      Eigen::MatrixXd m(rows, cols);
      std::memcpy(m.data(), bytes_.data() + at_, sizeof(double) * rows * cols);
      at_ += sizeof(double) * rows * cols;
      sections_[std::move(name)] = std::move(m);
    }
  }

  const Eigen::MatrixXd& matrix(const std::string& name) const {
    auto it = sections_.find(name);
    if (it == sections_.end()) throw std::runtime_error("artifact misses section " + name);
    return it->second;
  }
  bool has(const std::string& name) const { return sections_.count(name) > 0; }

  uint32_t version = 0;
  uint64_t library_hash = 0;
  double mesh_h = 0, sigma_t_ref = 0;
  int32_t c_lower = 0, c_upper = 0;

 private:
  template <typename T>
  T take() {
    T v;
    std::memcpy(&v, bytes_.data() + at_, sizeof v);
    at_ += sizeof v;
    return v;
  }
  uint64_t peek_u64(size_t at) const {
    uint64_t v;
    std::memcpy(&v, bytes_.data() + at, sizeof v);
    return v;
  }
  std::vector<char> bytes_;
  size_t at_ = 0;
  std::map<std::string, Eigen::MatrixXd> sections_;
};

std::string arch_key(int a, const std::string& what) {
  return "arch" + std::to_string(a) + "/" + what;
}

}  // namespace

void save_offline_cache(const OfflineCache& cache, const std::filesystem::path& path) {
  ArtifactWriter w(cache);
  Eigen::VectorXd meta(2);
  meta << cache.offline_seconds, cache.max_assembled_dofs;
  w.section("meta", meta);
  for (int r = 0; r < kNumRefPorts; ++r) {
    const std::string key = "port" + std::to_string(r) + "/";
    w.section(key + "modes", cache.ports[r].modes);
    w.section(key + "eigenvalues", cache.ports[r].eigenvalues);
    Eigen::VectorXd energy(1);
    energy << cache.ports[r].retained_energy;
    w.section(key + "energy", energy);
  }
  for (int a = 0; a < kNumArchetypes; ++a) {
    const ArchCache& ac = cache.arch[a];
    w.section(arch_key(a, "V"), ac.V);
    w.section(arch_key(a, "VtM"), ac.VtM);
    w.section(arch_key(a, "VtA"), ac.VtA);
    w.section(arch_key(a, "VtH"), ac.VtH);
    if (ac.VtF.size() > 0) w.section(arch_key(a, "VtF"), ac.VtF);
    if (ac.inhomog_eigenvalues.size() > 0)
      w.section(arch_key(a, "inhomog_eigenvalues"), ac.inhomog_eigenvalues);
    // one row per lift entry: side, ref port, n_modes, n_b, col0, bubble col0...
    Eigen::MatrixXd lifts(ac.lifts.size(), 5 + (ac.lifts.empty() ? 0 : 16));
    lifts.setConstant(-1);
    for (size_t i = 0; i < ac.lifts.size(); ++i) {
      const auto& e = ac.lifts[i];
      lifts(i, 0) = e.side == PortSide::Left ? 0 : 1;
      lifts(i, 1) = e.ref_port;
      lifts(i, 2) = e.n_modes;
      lifts(i, 3) = e.n_b;
      lifts(i, 4) = e.col0;
      for (size_t k = 0; k < e.bubble_col0.size(); ++k) lifts(i, 5 + k) = e.bubble_col0[k];
    }
    w.section(arch_key(a, "lifts"), lifts);
    Eigen::VectorXd extra(3);
    extra << ac.inhomog_col0, ac.n_f, ac.m;
    w.section(arch_key(a, "extra"), extra);
  }
  w.write(path);
}

OfflineCache load_offline_cache(const std::filesystem::path& path, uint64_t expected_hash) {
  ArtifactReader r(path);
  if (expected_hash != 0 && r.library_hash != expected_hash)
    throw std::runtime_error("offline cache was built for a different library");
  OfflineCache cache;
  cache.library_hash = r.library_hash;
  cache.mesh_h = r.mesh_h;
  cache.c_lower = r.c_lower;
  cache.c_upper = r.c_upper;
  cache.sigma_t_ref = r.sigma_t_ref;
  const Eigen::MatrixXd& meta = r.matrix("meta");
  cache.offline_seconds = meta(0, 0);
  cache.max_assembled_dofs = static_cast<int>(meta(1, 0));
  for (int p = 0; p < kNumRefPorts; ++p) {
    const std::string key = "port" + std::to_string(p) + "/";
    cache.ports[p].ref_port = p;
    cache.ports[p].modes = r.matrix(key + "modes");
    cache.ports[p].eigenvalues = r.matrix(key + "eigenvalues");
    cache.ports[p].retained_energy = r.matrix(key + "energy")(0, 0);
  }
  for (int a = 0; a < kNumArchetypes; ++a) {
    ArchCache& ac = cache.arch[a];
    ac.V = r.matrix(arch_key(a, "V"));
    ac.VtM = r.matrix(arch_key(a, "VtM"));
    ac.VtA = r.matrix(arch_key(a, "VtA"));
    ac.VtH = r.matrix(arch_key(a, "VtH"));
    if (r.has(arch_key(a, "VtF"))) ac.VtF = r.matrix(arch_key(a, "VtF"));
    if (r.has(arch_key(a, "inhomog_eigenvalues")))
      ac.inhomog_eigenvalues = r.matrix(arch_key(a, "inhomog_eigenvalues"));
    const Eigen::MatrixXd& lifts = r.matrix(arch_key(a, "lifts"));
    for (Eigen::Index i = 0; i < lifts.rows(); ++i) {
      ArchCache::LiftEntry e;
      e.side = lifts(i, 0) == 0 ? PortSide::Left : PortSide::Right;
      e.ref_port = static_cast<int>(lifts(i, 1));
      e.n_modes = static_cast<int>(lifts(i, 2));
      e.n_b = static_cast<int>(lifts(i, 3));
      e.col0 = static_cast<int>(lifts(i, 4));
      for (int k = 0; k < e.n_modes; ++k) e.bubble_col0.push_back(static_cast<int>(lifts(i, 5 + k)));
      ac.lifts.push_back(std::move(e));
    }
    const Eigen::MatrixXd& extra = r.matrix(arch_key(a, "extra"));
    ac.inhomog_col0 = static_cast<int>(extra(0, 0));
    ac.n_f = static_cast<int>(extra(1, 0));
    ac.m = static_cast<int>(extra(2, 0));
  }
  return cache;
}

void save_reduced_model(const ReducedModel& model, const OfflineCache& cache,
                        const std::filesystem::path& path) {
  ArtifactWriter w(cache);
  w.section("Z", model.Z);
  w.section("Mr", model.Mr);
  w.section("Cr", model.Cr);
  w.section("Ar", model.Ar);
  w.section("Hr", model.Hr);
  w.section("Qr", model.Qr);
  for (size_t s = 0; s < model.load_blocks.size(); ++s)
    w.section("load" + std::to_string(s), model.load_blocks[s]);
  Eigen::VectorXd ratios =
      Eigen::Map<const Eigen::VectorXd>(model.greedy_ratios.data(), model.greedy_ratios.size());
  w.section("greedy_ratios", ratios);
  w.write(path);
}

void save_sensor_output(const SensorTrajectory& traj, const OfflineCache& cache,
                        const std::filesystem::path& path) {
  ArtifactWriter w(cache);
  Eigen::VectorXd meta(2);
  meta << traj.t_final, traj.n_t;
  w.section("meta", meta);
  w.section("q", traj.q);
  w.write(path);
}

void write_sensor_csv(const SensorTrajectory& traj, const SensorSet& sensors,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t";
  for (const auto& pc : sensors.comps)
    for (int d = 0; d < 2; ++d)
      for (int s = 0; s < sensors.n_sensors_per_comp; ++s)
        out << ",c" << pc.comp + 1 << "_s" << s + 1 << (d == 0 ? "_x" : "_y");
  out << "\n";
  out.precision(10);
  for (int j = 0; j <= traj.n_t; ++j) {
    out << j * traj.dt();
    for (int c = 0; c < traj.q.cols(); ++c) out << "," << traj.q(j, c);
    out << "\n";
  }
}

}  // namespace prrbc
