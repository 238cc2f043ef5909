#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bohmflow/bohm_fields.hpp"
#include "bohmflow/diagnostics.hpp"
#include "bohmflow/negf.hpp"
#include "bohmflow/trajectories.hpp"

namespace bohmflow::io {

inline constexpr const char* kFieldsSchema = "bohmflow.fields";
inline constexpr int kFieldsSchemaVersion = 1;

/// Streams per-frame field records as NDJSON. The first line is a header
/// object {schema, schema_version, created, ...}; "created" is the only
/// non-deterministic field in any output. Each following line is one frame:
/// {t, x, re_psi, im_psi, P, p_R, p_I, v_r, V_qu, J, mask}, with mask[i] true
/// on valid points and masked field entries written as 0.
class FieldsWriter {
 public:
  /// extra is merged into the header (grid, units, potential, ...).
  FieldsWriter(const std::filesystem::path& path, const nlohmann::json& extra = {});

  void write(const WavefunctionFrame& frame, const BohmFieldSet& fields);
  std::size_t records() const noexcept { return records_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t records_ = 0;
};

void write_fields_ndjson(const std::filesystem::path& path,
                         std::span<const WavefunctionFrame> frames,
                         std::span<const BohmFieldSet> fields, const nlohmann::json& extra = {});

struct FieldRecord {
  double t = 0.0;
  std::vector<double> x, re_psi, im_psi, P, p_R, p_I, v_r, V_qu, J;
  std::vector<bool> mask;
};

struct FieldsFile {
  nlohmann::json header;
  std::vector<FieldRecord> records;
};

/// Throws IoError on unreadable files, schema mismatches or malformed records.
FieldsFile read_fields_ndjson(const std::filesystem::path& path);

/// One row per (trajectory, stored time): traj_id,t,x,flag. The flag is the
/// trajectory's final classification.
void write_trajectories_csv(const std::filesystem::path& path, const TrajectoryEnsemble& ensemble);

/// One row per site: site,abs_G,theta,v,J. J on site i is the current through
/// the bond (i, i+1); the last site carries the outflow into the right lead.
void write_negf_energy_csv(const std::filesystem::path& path, const negf::SweepPoint& point);

/// energy,transmission,current_left_lead,current_right_lead,max_divergence
void write_negf_sweep_csv(const std::filesystem::path& path,
                          std::span<const negf::SweepPoint> points);

nlohmann::json to_json(const DiagnosticsReport& report);
nlohmann::json to_json(const TunnelReport& report);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

/// Creates the directory (and parents); throws IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace bohmflow::io
