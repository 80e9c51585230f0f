#include "prrbc/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prrbc {

using nlohmann::json;

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

json bounds_to_json(const ParameterBounds& b) {
  return json{{"alpha_ray", {b.alpha_min, b.alpha_max}},
              {"beta_ray", {b.beta_min, b.beta_max}},
              {"youngs", {b.youngs_min, b.youngs_max}},
              {"amplitude", {b.amplitude_min, b.amplitude_max}},
              {"sigma_x", {b.sigma_x_min, b.sigma_x_max}},
              {"friction", {b.friction_min, b.friction_max}},
              {"activation_extent", {b.d_min, b.d_max}},
              {"speed", {b.speed_min, b.speed_max}},
              {"axle_gap", {{"mean", b.axle_gap_mean}, {"std", b.axle_gap_std}}},
              {"rho", b.rho},
              {"nu", b.nu}};
}

void interval(const json& j, const char* key, double& lo, double& hi) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2)
    throw std::invalid_argument(std::string("config: '") + key + "' must be an [lo, hi] pair");
  lo = v[0].get<double>();
  hi = v[1].get<double>();
  if (!(lo <= hi))
    throw std::invalid_argument(std::string("config: '") + key + "' interval is reversed");
}

ParameterBounds bounds_from_json(const json& j) {
  ParameterBounds b;
  interval(j, "alpha_ray", b.alpha_min, b.alpha_max);
  interval(j, "beta_ray", b.beta_min, b.beta_max);
  interval(j, "youngs", b.youngs_min, b.youngs_max);
  interval(j, "amplitude", b.amplitude_min, b.amplitude_max);
  interval(j, "sigma_x", b.sigma_x_min, b.sigma_x_max);
  interval(j, "friction", b.friction_min, b.friction_max);
  interval(j, "activation_extent", b.d_min, b.d_max);
  interval(j, "speed", b.speed_min, b.speed_max);
  if (j.contains("axle_gap")) {
    b.axle_gap_mean = j.at("axle_gap").value("mean", b.axle_gap_mean);
    b.axle_gap_std = j.at("axle_gap").value("std", b.axle_gap_std);
  }
  b.rho = j.value("rho", b.rho);
  b.nu = j.value("nu", b.nu);
  return b;
}

json config_to_json(const Config& c) {
  return json{{"library",
               {{"span_length", c.span_length},
                {"thickness", c.thickness},
                {"mesh_h", c.mesh_h},
                {"crack_depth_frac", c.crack_depth_frac},
                {"crack_opening", c.crack_opening},
                {"pier_height_factor", c.pier_height_factor}}},
              {"bounds", bounds_to_json(c.bounds)},
              {"frequency_set", {{"c_lower", c.c_lower}, {"c_upper", c.c_upper}}},
              {"rom",
               {{"port_modes", c.port_modes},
                {"lifting_bubbles", c.lifting_bubbles},
                {"inhomogeneity_bubbles", c.inhomogeneity_bubbles},
                {"port_train_samples", c.port_train_samples},
                {"bubble_train_samples", c.bubble_train_samples},
                {"eim_tol", c.eim_tol},
                {"eim_q_max", c.eim_q_max},
                {"eim_points_per_sigma", c.eim_points_per_sigma},
                {"greedy_eps", c.greedy_eps},
                {"greedy_n_cap", c.greedy_n_cap}}},
              {"time",
               {{"n_t", c.n_t},
                {"richardson_tol", c.richardson_tol},
                {"richardson_max_n_t", c.richardson_max_n_t}}},
              {"sensors",
               {{"near", c.sensor_near}, {"far", c.sensor_far}, {"bottom", c.sensor_bottom}}},
              {"offline_seed", c.offline_seed}};
}

Config config_from_json(const json& j) {
  Config c;
  if (j.contains("library")) {
    const auto& l = j.at("library");
    c.span_length = l.value("span_length", c.span_length);
    c.thickness = l.value("thickness", c.thickness);
    c.mesh_h = l.value("mesh_h", c.mesh_h);
    c.crack_depth_frac = l.value("crack_depth_frac", c.crack_depth_frac);
    c.crack_opening = l.value("crack_opening", c.crack_opening);
    c.pier_height_factor = l.value("pier_height_factor", c.pier_height_factor);
  }
  if (j.contains("bounds")) c.bounds = bounds_from_json(j.at("bounds"));
  if (j.contains("frequency_set")) {
    c.c_lower = j.at("frequency_set").value("c_lower", c.c_lower);
    c.c_upper = j.at("frequency_set").value("c_upper", c.c_upper);
  }
  if (j.contains("rom")) {
    const auto& r = j.at("rom");
    if (r.contains("port_modes")) {
      const auto& pm = r.at("port_modes");
      if (!pm.is_array() || pm.size() != 4)
        throw std::invalid_argument("config: 'rom.port_modes' must hold four sizes");
      for (int i = 0; i < 4; ++i) c.port_modes[i] = pm[i].get<int>();
    }
    c.lifting_bubbles = r.value("lifting_bubbles", c.lifting_bubbles);
    c.inhomogeneity_bubbles = r.value("inhomogeneity_bubbles", c.inhomogeneity_bubbles);
    c.port_train_samples = r.value("port_train_samples", c.port_train_samples);
    c.bubble_train_samples = r.value("bubble_train_samples", c.bubble_train_samples);
    c.eim_tol = r.value("eim_tol", c.eim_tol);
    c.eim_q_max = r.value("eim_q_max", c.eim_q_max);
    c.eim_points_per_sigma = r.value("eim_points_per_sigma", c.eim_points_per_sigma);
    c.greedy_eps = r.value("greedy_eps", c.greedy_eps);
    c.greedy_n_cap = r.value("greedy_n_cap", c.greedy_n_cap);
  }
  if (j.contains("time")) {
    const auto& t = j.at("time");
    c.n_t = t.value("n_t", c.n_t);
    c.richardson_tol = t.value("richardson_tol", c.richardson_tol);
    c.richardson_max_n_t = t.value("richardson_max_n_t", c.richardson_max_n_t);
  }
  if (j.contains("sensors")) {
    const auto& s = j.at("sensors");
    c.sensor_near = s.value("near", c.sensor_near);
    c.sensor_far = s.value("far", c.sensor_far);
    c.sensor_bottom = s.value("bottom", c.sensor_bottom);
  }
  c.offline_seed = j.value("offline_seed", c.offline_seed);
  c.validate();
  return c;
}

}  // namespace

void Config::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + msg);
  };
  require(span_length > 0 && thickness > 0, "library dimensions must be positive");
  require(mesh_h > 0, "'library.mesh_h' must be positive");
  require(crack_depth_frac > 0 && crack_depth_frac < 1,
          "'library.crack_depth_frac' must lie in (0,1)");
  require(c_lower >= 1 && c_upper >= 1, "'frequency_set' constants must be positive");
  require(bounds.nu > 0 && bounds.nu < 0.5, "'bounds.nu' must lie in (0, 0.5)");
  require(bounds.rho > 0, "'bounds.rho' must be positive");
  require(bounds.speed_min > 0, "'bounds.speed' must be positive");
  require(bounds.d_min > 0, "'bounds.activation_extent' must be positive");
  for (int m : port_modes) require(m >= 1, "'rom.port_modes' must be at least 1");
  require(lifting_bubbles >= 1 && inhomogeneity_bubbles >= 1, "bubble sizes must be at least 1");
  require(eim_tol > 0 && greedy_eps >= 0, "tolerances must be non-negative");
  require(n_t >= 2, "'time.n_t' must be at least 2");
}

std::string Config::to_json_string() const { return config_to_json(*this).dump(2); }

Config Config::from_json_string(const std::string& text) {
  return config_from_json(json::parse(text));
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config parse error in " + path + ": " + e.what());
  }
  return config_from_json(j);
}

void Config::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << to_json_string() << "\n";
}

uint64_t Config::library_hash() const {
  json j = config_to_json(*this);
  j.erase("sensors");  // sensor placement does not shape the offline artifact
  j.erase("time");
  const std::string s = j.dump();
  return fnv1a64(s.data(), s.size());
}

uint64_t Config::config_hash() const {
  const std::string s = to_json_string();
  return fnv1a64(s.data(), s.size());
}

std::vector<double> omega_set(const Config& cfg) {
  std::vector<double> out(cfg.n_omega());
  const double dw = cfg.d_omega();
  for (int i = 0; i < cfg.n_omega(); ++i) out[i] = i * dw;
  return out;
}

Config Config::smoke() {
  Config c;
  c.mesh_h = 0.5;
  c.c_lower = 5;
  c.c_upper = 2;  // n_omega = 11
  c.port_train_samples = 60;
  c.bubble_train_samples = 12;
  c.n_t = 400;
  c.richardson_max_n_t = 4000;
  return c;
}

}  // namespace prrbc
