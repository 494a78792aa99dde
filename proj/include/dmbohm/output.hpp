#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "dmbohm/config.hpp"

namespace dmbohm {

/// `traj_id,t,x[,y]`, one row per trajectory per record, trajectories in id order.
void write_trajectories_csv(std::ostream& out, const TrajectoryEnsemble& e);

/// One JSON object per trajectory: traj_id, status, flag_time, t, x[, y], branch.
void write_trajectories_jsonl(std::ostream& out, const TrajectoryEnsemble& e);

/// `x[,y],P,Jx[,Jy]` for one guidance snapshot.
void write_field_csv(std::ostream& out, const GuidanceField& g);

/// Summary JSON (schema "dmbohm.summary/1").
std::string summary_json(const ScenarioResult& r, const RunConfig& c);

struct RunManifest {
  std::string command;
  std::uint64_t config_digest = 0;
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> artifacts;
  std::string version = DMBOHM_VERSION;
  double wall_clock_seconds = 0.0;
  std::vector<std::string> flags;
};

std::string manifest_json(const RunManifest& m);

struct SvgStyle {
  int width = 800;
  int height = 480;
  double axis = 0.0;  // symmetry axis x = axis
  int coordinate = 0;
};

/// (t, x) polyline per trajectory plus the symmetry axis. Throws EmptyEnsemble.
std::string emit_svg(const TrajectoryEnsemble& e, const SvgStyle& style = {});

/// Write `text` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dmbohm
