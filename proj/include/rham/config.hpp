#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rham/field.hpp"
#include "rham/flow.hpp"

namespace rham {

enum class Command {
  SampleField,
  Flow,
  Diffusion,
  Intersections,
  RandomWalk,
  RkhsNorm,
  Tails,
  Concentration,
  Inversion,
};

const char* to_string(Command c) noexcept;
/// Throws ValidationError("command") for unknown names.
Command parse_command(const std::string& name);

/// Every knob of every experiment. One flat key space shared by all commands.
struct ExperimentConfig {
  Command command = Command::SampleField;
  std::vector<double> regularities{0.1};
  Truncation truncation;
  KernelTag kernel = KernelTag::D2Periodic;
  double per_mode_scale = 1.0;
  double mean_offset = 0.0;
  int d1_grid_nodes = 64;
  int samples = 100;
  FlowSettings flow;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool plot = false;

  // intersections / flow
  std::vector<std::string> lagrangians{"L1", "L2",  "L3",  "L4",  "L5",  "L6",  "L7",
                                       "L8", "L9",  "L10", "L11", "L12", "L13", "L14"};
  int curve_vertices = 256;

  // diffusion
  int points = 100;
  double ball_center_x = 0.5;
  double ball_center_y = 0.5;
  double ball_radius = 0.1;
  std::vector<double> times{0.0, 0.05, 0.1, 0.25};
  int grid = 10;

  // osc-based statistics
  int osc_spatial_grid = 128;
  int osc_time_grid = 101;

  // random walk
  int walk_steps = 5;

  // probes
  double probe_x = 0.3;
  double probe_y = 0.7;

  // rkhs
  double weighted_sum_eps = 0.01;

  // sample-field plots
  int arrow_grid = 24;

  void validate() const;
  /// Law-defining config for regularity index i.
  LawDefiningConfig law(std::size_t i) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses `key = value` lines ('#' comments). Applies defaults, rejects
/// unknown or repeated keys (ParseError with line number) and out-of-range
/// values (ValidationError naming the field).
ExperimentConfig parse_config(const std::string& text, Command command);

/// Sets a single key on an existing config with the same validation as parse_config.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Full effective config; parse_config(serialize_config(c), c.command) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace rham
