#pragma once

#include <string>
#include <vector>

#include "rham/experiments.hpp"

namespace rham {

/// CSV with header "label,regularity,estimate,stderr,samples"; six significant digits.
void write_table(const ResultTable& table, const std::string& path);
ResultTable read_table(const std::string& path);
std::string format_table(const ResultTable& table);

void write_text(const std::string& path, const std::string& text);

/// Quiver plot of X_H(t, .) on an arrow_grid^2 lattice.
std::string field_svg(const HamiltonianField& h, double t, int arrow_grid);
void render_field_svg(const HamiltonianField& h, double t, const std::string& path,
                      int arrow_grid = 24);

/// Curves drawn in the unit square, split where the lift leaves a fundamental domain.
std::string curves_svg(const std::vector<LagrangianCurve>& curves);
void render_curves_svg(const std::vector<LagrangianCurve>& curves, const std::string& path);

std::string histogram_svg(const std::vector<double>& values, int bins, const std::string& title);
void render_histogram_svg(const std::vector<double>& values, int bins, const std::string& title,
                          const std::string& path);

/// Runs config.command and writes its artifacts under config.out_dir.
/// Returns a short human-readable summary.
std::string run_command(const ExperimentConfig& config);

}  // namespace rham
