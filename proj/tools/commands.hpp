#pragma once

// Front end for the susyqm command-line tool. Everything here is reachable
// from tests through run(), which never calls exit().

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace susyqm::cli {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr const char* output_dir_env = "SUSYQM_OUTPUT_DIR";

enum class Model { free, lame };
enum class Format { csv, json };

/// Resolved settings for one invocation.
struct RunConfig {
  Model model = Model::free;
  double kappa1 = 1.0;
  double m = 0.5;
  std::optional<double> epsilon1;
  std::optional<double> D;
  std::optional<double> x0;
  std::string orientation = "growing";
  std::string branch = "beta";
  std::optional<double> x_min;
  std::optional<double> x_max;
  std::optional<long> n_points;
  Format format = Format::csv;
  std::string output;
  std::string svg;

  double D_min = -5.0;
  double D_max = 5.0;
  int samples = 101;
  int periods = 16;
  int cells_per_period = 370;
  std::string suite = "all";
};

/// Named figure presets: "fig1", "fig3", "fig4". Throws InputError otherwise.
RunConfig profile(const std::string& name);

/// Overlays fields present in a metadata-shaped object:
/// {"model", "parameters": {...}, "grid": {"x_min", "x_max", "n_points"}}.
void apply_config(RunConfig& cfg, const nlohmann::json& meta);

/// Metadata block written into JSON output and accepted by --config.
nlohmann::json metadata(const RunConfig& cfg);

/// Columnar result of one subcommand.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;  // numbers, bools, strings or null
};

Table partner_table(const RunConfig& cfg);
Table scan_table(const RunConfig& cfg);
Table bands_table(const RunConfig& cfg);

void write_csv(std::ostream& os, const Table& table);
void write_json(std::ostream& os, const Table& table, const nlohmann::json& meta);
/// Line chart of V and Vt against x, with |psi|^2 on a second panel.
void write_svg(std::ostream& os, const Table& partner);

/// Parses argv (without the program name) and executes. Exit codes:
/// 0 success, 1 failed verification, 2 usage error, 3 singular transform,
/// 4 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace susyqm::cli
