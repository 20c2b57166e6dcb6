#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levyflat::cli {

/// Gnuplot two-column data from a report: distance_vs_time.dat,
/// flatness_spectra.dat (one index block per base point) and
/// principal_angle_chain.dat. Files are only written when the report holds
/// the data. Returns the paths written; throws ConfigError on a missing or
/// unreadable report.
std::vector<std::string> emit_plots(const std::string& report_path, const std::string& out_dir);

/// emit_plots with exit-code mapping (0 or 2).
int emit_plots_command(const std::string& report_path, const std::string& out_dir, std::ostream& out,
                       std::ostream& err);

}  // namespace levyflat::cli
