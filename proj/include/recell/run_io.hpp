#pragma once

#include <string>
#include <vector>

#include "recell/cell.hpp"
#include "recell/config.hpp"
#include "recell/raytrace.hpp"
#include "recell/spin_noise.hpp"

namespace recell {

inline constexpr const char* kToolVersion = "recell 0.1.0";

// CSV bodies, %.17g numerics, '\n' rows, header first
std::string spot_csv(const std::vector<SpotRecord>& spots);
std::string trace_csv(const TraceResult& trace);
std::string correlation_csv(const CorrelationResult& r);  // oracle cols if present
std::string psd_csv(const std::vector<double>& freq_hz,
                    const std::vector<double>& psd);
std::string sweep_csv(const SweepResult& grid);

// run manifest: everything needed to reproduce the run bit-for-bit except the
// wall clock.  `derived` and `outputs` arrive as already-serialized JSON
// fragments (objects); pass "{}" / "[]" when empty.
struct ManifestInfo {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_normalized;
  std::string derived_json = "{}";
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;
};
std::string manifest_json(const ManifestInfo& info);

// config loader that also accepts a previous run's manifest (.json): the
// embedded normalized config is extracted and re-parsed
RunConfig load_config_or_manifest(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
void ensure_dir(const std::string& path);

std::string utc_timestamp();

}  // namespace recell
