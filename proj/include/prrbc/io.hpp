#ifndef PRRBC_IO_HPP
#define PRRBC_IO_HPP

#include <filesystem>
#include <string>

#include "prrbc/rom_online.hpp"

namespace prrbc {

// Single binary artifact format shared by the offline cache, reduced models
// and sensor outputs:
//   magic "PRRBCART", u32 format version,
//   u64 library hash, f64 mesh h, i32 c_lower, i32 c_upper, f64 sigma_t_ref,
//   then named sections [u32 name length, name bytes, u64 rows, u64 cols,
//   rows*cols little-endian f64, column-major], terminated by an empty name,
//   followed by the FNV-1a checksum (u64) of everything before it.
inline constexpr uint32_t kArtifactVersion = 1;

void save_offline_cache(const OfflineCache& cache, const std::filesystem::path& path);
// Verifies the checksum and the library hash; throws on mismatch.
OfflineCache load_offline_cache(const std::filesystem::path& path, uint64_t expected_hash);

void save_reduced_model(const ReducedModel& model, const OfflineCache& cache,
                        const std::filesystem::path& path);

void save_sensor_output(const SensorTrajectory& traj, const OfflineCache& cache,
                        const std::filesystem::path& path);

// CSV with a time column followed by one column per sensor-direction signal.
void write_sensor_csv(const SensorTrajectory& traj, const SensorSet& sensors,
                      const std::filesystem::path& path);

}  // namespace prrbc

#endif
