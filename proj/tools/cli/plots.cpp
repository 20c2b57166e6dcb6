#include "cli/plots.hpp"

#include "levyflat/errors.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace levyflat::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string value(const json& v) {
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return "nan";
}

void write(const fs::path& path, const std::string& text, std::vector<std::string>& written) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  written.push_back(path.string());
}

}  // namespace

std::vector<std::string> emit_plots(const std::string& report_path, const std::string& out_dir) {
  std::ifstream in(report_path);
  if (!in) throw ConfigError("cannot read report '" + report_path + "'");
  json report;
  try {
    report = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("report '" + report_path + "': " + e.what());
  }
  const fs::path dir = out_dir.empty() ? fs::path(report_path).parent_path() : fs::path(out_dir);
  if (!dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create '" + dir.string() + "': " + ec.message());
  }
  std::vector<std::string> written;

  if (report.contains("tests")) {
    for (const auto& t : report.at("tests")) {
      if (t.value("name", "") != "path-invariance" || t.value("trace", json::array()).empty()) continue;
      std::ostringstream os;
      os << "# t max_distance_to_manifold\n";
      for (const auto& p : t.at("trace")) os << value(p[0]) << ' ' << value(p[1]) << '\n';
      write(dir / "distance_vs_time.dat", os.str(), written);
    }
  }

  if (report.contains("flatness") && report.at("flatness").is_object()) {
    const json& f = report.at("flatness");
    if (!f.value("per_point", json::array()).empty()) {
      std::ostringstream os;
      bool first = true;
      std::size_t i = 0;
      for (const auto& p : f.at("per_point")) {
        if (!first) os << "\n\n";
        first = false;
        os << "# point " << i++ << ": index singular_value\n";
        std::size_t k = 0;
        for (const auto& s : p.at("spectrum")) os << k++ << ' ' << value(s) << '\n';
      }
      write(dir / "flatness_spectra.dat", os.str(), written);
    }
    const json chain = f.contains("chain") ? f.at("chain").value("pairs", json::array()) : json::array();
    if (!chain.empty()) {
      std::ostringstream os;
      os << "# pair_index max_principal_angle\n";
      std::size_t i = 0;
      for (const auto& p : chain) os << i++ << ' ' << value(p.at("angle")) << '\n';
      write(dir / "principal_angle_chain.dat", os.str(), written);
    }
  }
  return written;
}

int emit_plots_command(const std::string& report_path, const std::string& out_dir, std::ostream& out,
                       std::ostream& err) {
  try {
    for (const auto& f : emit_plots(report_path, out_dir)) out << f << '\n';
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace levyflat::cli
