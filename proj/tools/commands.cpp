#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include "CLI11.hpp"
#include "susyqm/checks.hpp"
#include "susyqm/free_particle.hpp"
#include "susyqm/lame.hpp"
#include "susyqm/susy.hpp"
#include "susyqm/verify.hpp"

namespace susyqm::cli {

using nlohmann::json;

namespace {

const char* to_string(Model m) { return m == Model::free ? "free" : "lame"; }

Model parse_model(const std::string& s) {
  if (s == "free") return Model::free;
  if (s == "lame") return Model::lame;
  throw InputError("unknown model '" + s + "' (expected free or lame)");
}

Orientation parse_orientation(const std::string& s) {
  if (s == "growing") return Orientation::growing;
  if (s == "decaying") return Orientation::decaying;
  throw InputError("unknown orientation '" + s + "' (expected growing or decaying)");
}

BlochBranch parse_branch(const std::string& s) {
  if (s == "beta") return BlochBranch::beta;
  if (s == "inverse_beta") return BlochBranch::inverse_beta;
  throw InputError("unknown branch '" + s + "' (expected beta or inverse_beta)");
}

Grid grid_of(const RunConfig& cfg) {
  const bool free = cfg.model == Model::free;
  const Grid g{cfg.x_min.value_or(free ? -10.0 : -20.0), cfg.x_max.value_or(free ? 10.0 : 20.0),
               cfg.n_points.value_or(free ? 2001 : 4001)};
  validate(g);
  return g;
}

double free_kappa(const RunConfig& cfg) {
  const double kappa = cfg.epsilon1 ? free_kappa_from_energy(*cfg.epsilon1) : cfg.kappa1;
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InputError("kappa1 must be positive");
  return kappa;
}

// D of the free model: given directly, or placing the well at x0.
double free_D(const RunConfig& cfg, double kappa) {
  const auto orient = parse_orientation(cfg.orientation);
  const double from_x0 = free_D_from_x0(kappa, cfg.x0.value_or(0.0), orient);
  if (!cfg.D) return from_x0;
  if (cfg.x0 && std::abs(*cfg.D - from_x0) > 1e-12 * std::abs(from_x0))
    throw InputError("free model: give either --D or --x0, not both");
  return *cfg.D;
}

double require(const std::optional<double>& v, const char* name) {
  if (!v) throw InputError(std::string("lame model requires --") + name);
  return *v;
}

// Calls f(seed, V) with the configured seed, for either scalar type.
template <typename F>
auto with_seed(const RunConfig& cfg, F&& f) {
  if (cfg.model == Model::free) {
    const double kappa = free_kappa(cfg);
    return f(free_seed(kappa, parse_orientation(cfg.orientation)), Potential(free_potential));
  }
  if (!(cfg.m > 0.0 && cfg.m < 1.0)) throw InputError("lame model requires 0 < m < 1");
  const double eps = require(cfg.epsilon1, "epsilon");
  const double x0 = cfg.x0.value_or(0.0);
  const double m = cfg.m;
  auto seed = translated(lame_seed(m, eps, parse_branch(cfg.branch)), x0);
  return f(std::move(seed), Potential([m, x0](double x) { return lame_potential(m, x - x0); }));
}

double resolved_D(const RunConfig& cfg) {
  return cfg.model == Model::free ? free_D(cfg, free_kappa(cfg)) : require(cfg.D, "D");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return format_number(v.get<double>());
  return v.get<std::string>();
}

// Crossing location: finite numbers as-is, +/-inf as strings, none as null.
json crossing_cell(const std::optional<double>& c) {
  if (!c) return nullptr;
  if (std::isinf(*c)) return *c > 0 ? "inf" : "-inf";
  return *c;
}

double number_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) && !obj[key].is_null() ? obj[key].get<double>() : fallback;
}

template <typename T>
void set_if(const json& obj, const char* key, std::optional<T>& field) {
  if (obj.contains(key) && !obj[key].is_null()) field = obj[key].get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
  for (const auto& item : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return item.key() == k; }))
      throw InputError(std::string("config: unknown key '") + item.key() + "' in " + where);
  }
}

std::filesystem::path output_path(const RunConfig& cfg, const std::string& stem) {
  if (!cfg.output.empty()) return cfg.output;
  const char* dir = std::getenv(output_dir_env);
  if (!dir || !*dir) return {};
  const char* ext = cfg.format == Format::json ? ".json" : ".csv";
  return std::filesystem::path(dir) / (stem + ext);
}

void emit(const RunConfig& cfg, const Table& table, const std::string& stem, std::ostream& out,
          std::ostream& err) {
  const auto path = output_path(cfg, stem);
  std::ofstream file;
  std::ostream* os = &out;
  if (!path.empty()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    file.open(path, std::ios::binary);
    if (!file) throw InputError("cannot open output file " + path.string());
    os = &file;
  }
  if (cfg.format == Format::json)
    write_json(*os, table, metadata(cfg));
  else
    write_csv(*os, table);
  if (!path.empty()) err << "wrote " << path.string() << '\n';
}

int verify_command(const RunConfig& cfg, std::ostream& out) {
  const auto results = run_suite(cfg.suite);
  std::size_t failed = 0;
  for (const auto& r : results) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s  %-52s %11.3e  (tol %.0e)", r.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.value, r.tolerance);
    out << line << '\n';
    if (!r.passed) ++failed;
  }
  out << results.size() - failed << '/' << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

RunConfig profile(const std::string& name) {
  RunConfig cfg;
  if (name == "fig1") {
    cfg.model = Model::free;
    cfg.epsilon1 = -1.0;
    cfg.x0 = 3.0;
    cfg.x_min = -7.0;
    cfg.x_max = 13.0;
    cfg.n_points = 2001;
  } else if (name == "fig3") {
    cfg.model = Model::lame;
    cfg.m = 0.5;
    cfg.epsilon1 = 0.1;
    cfg.D = -45.0;
    cfg.x0 = 0.0;
    cfg.x_min = -20.0;
    cfg.x_max = 20.0;
    cfg.n_points = 4001;
  } else if (name == "fig4") {
    cfg.model = Model::lame;
    cfg.m = 0.1;
    cfg.epsilon1 = 1.05;
    cfg.D = 20.0;
    cfg.x0 = 0.0;
    cfg.x_min = -60.0;
    cfg.x_max = 60.0;
    cfg.n_points = 12001;
  } else {
    throw InputError("unknown profile '" + name + "' (expected fig1, fig3 or fig4)");
  }
  return cfg;
}

void apply_config(RunConfig& cfg, const json& meta) {
  if (!meta.is_object()) throw InputError("config: expected a JSON object");
  reject_unknown(meta, {"model", "parameters", "grid", "tool_version"}, "top level");
  if (meta.contains("model")) cfg.model = parse_model(meta["model"].get<std::string>());
  if (meta.contains("parameters")) {
    const auto& p = meta["parameters"];
    reject_unknown(p, {"kappa1", "m", "epsilon1", "D", "x0", "orientation", "branch"}, "parameters");
    cfg.kappa1 = number_or(p, "kappa1", cfg.kappa1);
    cfg.m = number_or(p, "m", cfg.m);
    set_if(p, "epsilon1", cfg.epsilon1);
    set_if(p, "D", cfg.D);
    set_if(p, "x0", cfg.x0);
    if (p.contains("orientation")) cfg.orientation = p["orientation"].get<std::string>();
    if (p.contains("branch")) cfg.branch = p["branch"].get<std::string>();
  }
  if (meta.contains("grid")) {
    const auto& g = meta["grid"];
    reject_unknown(g, {"x_min", "x_max", "n_points"}, "grid");
    set_if(g, "x_min", cfg.x_min);
    set_if(g, "x_max", cfg.x_max);
    set_if(g, "n_points", cfg.n_points);
  }
}

json metadata(const RunConfig& cfg) {
  json params;
  if (cfg.model == Model::free) {
    const double kappa = free_kappa(cfg);
    params["kappa1"] = kappa;
    params["epsilon1"] = -kappa * kappa;
    params["orientation"] = cfg.orientation;
  } else {
    params["m"] = cfg.m;
    params["epsilon1"] = cfg.epsilon1 ? json(*cfg.epsilon1) : json(nullptr);
    params["branch"] = cfg.branch;
  }
  params["D"] = cfg.model == Model::free || cfg.D ? json(resolved_D(cfg)) : json(nullptr);
  params["x0"] = cfg.x0 ? json(*cfg.x0) : json(nullptr);
  const Grid g = grid_of(cfg);
  return {{"model", to_string(cfg.model)},
          {"parameters", params},
          {"grid", {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n_points", g.n}}},
          {"tool_version", tool_version}};
}

Table partner_table(const RunConfig& cfg) {
  const Grid grid = grid_of(cfg);
  const double D = resolved_D(cfg);
  return with_seed(cfg, [&](auto seed, const Potential& V) {
    const auto r = confluent_partner_differential(seed, D, V, grid);
    Table t{{"x", "V", "Vt", "psi", "psi2"}, {}};
    t.rows.reserve(static_cast<std::size_t>(grid.n));
    for (Eigen::Index i = 0; i < grid.n; ++i) {
      const auto psi = r.bound_state[i];
      const double re = detail::partner_real(psi);
      t.rows.push_back({grid[i], V(grid[i]), r.partner_potential[i], re, std::norm(psi)});
    }
    return t;
  });
}

Table scan_table(const RunConfig& cfg) {
  if (!(cfg.D_max > cfg.D_min) || cfg.samples < 2)
    throw InputError("scan-d: empty D range (need D_min < D_max and at least 2 samples)");
  const Grid grid = grid_of(cfg);
  return with_seed(cfg, [&](auto seed, const Potential&) {
    Table t{{"D", "nonsingular", "crossing"}, {}};
    for (const auto& row : singularity_scan(seed, cfg.D_min, cfg.D_max, cfg.samples, grid))
      t.rows.push_back({row.D, !row.singular, crossing_cell(row.crossing)});
    return t;
  });
}

Table bands_table(const RunConfig& cfg) {
  if (!(cfg.m > 0.0 && cfg.m < 1.0)) throw InputError("bands: require 0 < m < 1");
  if (cfg.periods < 1 || cfg.cells_per_period < 20)
    throw InputError("bands: need at least 1 period and 20 cells per period");
  EigensolveConfig ec;
  ec.boundary = Boundary::periodic;
  ec.x_min = 0.0;
  ec.x_max = cfg.periods * 2.0 * complete_K(cfg.m);
  ec.n_points = static_cast<Eigen::Index>(cfg.periods) * cfg.cells_per_period + 1;
  const auto numeric = band_edges_numeric(cfg.m, ec);
  const auto analytic = lame_bands(cfg.m).band_edges;
  Table t{{"quantity", "analytic", "numeric", "discrepancy"}, {}};
  const char* names[] = {"band1_bottom", "band1_top", "band2_bottom"};
  for (int k = 0; k < 3; ++k)
    t.rows.push_back({names[k], analytic[k], numeric[k], std::abs(numeric[k] - analytic[k])});
  const double gap = analytic[2] - analytic[1], gap_num = numeric[2] - numeric[1];
  t.rows.push_back({"finite_gap_width", gap, gap_num, std::abs(gap_num - gap)});
  return t;
}

void write_csv(std::ostream& os, const Table& table) {
  for (std::size_t j = 0; j < table.columns.size(); ++j)
    os << (j ? "," : "") << table.columns[j];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << csv_cell(row[j]);
    os << '\n';
  }
}

void write_json(std::ostream& os, const Table& table, const json& meta) {
  json doc;
  doc["metadata"] = meta;
  doc["columns"] = table.columns;
  json rows = json::array();
  for (const auto& row : table.rows) rows.push_back(row);
  doc["rows"] = std::move(rows);
  os << doc.dump() << '\n';
}

void write_svg(std::ostream& os, const Table& partner) {
  constexpr double width = 800, panel = 260, margin = 40;
  const std::size_t n = partner.rows.size();
  if (n < 2) throw InputError("svg: nothing to plot");
  auto col = [&](std::size_t j) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = partner.rows[i][j].get<double>();
    return v;
  };
  const auto x = col(0), V = col(1), Vt = col(2), rho = col(4);
  auto range = [](std::initializer_list<const std::vector<double>*> cols) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* c : cols)
      for (double v : *c) lo = std::min(lo, v), hi = std::max(hi, v);
    if (hi - lo < 1e-12) hi = lo + 1.0;
    return std::pair{lo, hi};
  };
  const auto [ylo, yhi] = range({&V, &Vt});
  const auto [rlo, rhi] = range({&rho});
  const double xlo = x.front(), xhi = x.back();
  auto polyline = [&](const std::vector<double>& y, double lo, double hi, double top,
                      const char* style) {
    os << "<polyline fill=\"none\" " << style << " points=\"";
    char buf[64];
    for (std::size_t i = 0; i < n; ++i) {
      const double px = margin + (x[i] - xlo) / (xhi - xlo) * (width - 2 * margin);
      const double py = top + panel - (y[i] - lo) / (hi - lo) * panel;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px, py);
      os << buf;
    }
    os << "\"/>\n";
  };
  const double height = 2 * panel + 3 * margin;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (double top : {margin, 2 * margin + panel})
    os << "<rect x=\"" << margin << "\" y=\"" << top << "\" width=\"" << width - 2 * margin
       << "\" height=\"" << panel << "\" fill=\"none\" stroke=\"#888\"/>\n";
  polyline(V, ylo, yhi, margin, "stroke=\"#555\" stroke-dasharray=\"4 3\"");
  polyline(Vt, ylo, yhi, margin, "stroke=\"#c00\"");
  polyline(rho, rlo, rhi, 2 * margin + panel, "stroke=\"#00c\"");
  os << "<text x=\"" << margin << "\" y=\"" << margin - 8 << "\" font-size=\"13\">V (dashed), Vt [" << format_number(ylo)
     << ", " << format_number(yhi) << "]</text>\n";
  os << "<text x=\"" << margin << "\" y=\"" << 2 * margin + panel - 8
     << "\" font-size=\"13\">|psi|^2</text>\n</svg>\n";
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Confluent second-order SUSY partners of the free particle and the n = 1 Lame potential"};
  app.set_version_flag("--version", tool_version);
  app.require_subcommand(1);

  std::optional<std::string> model, orientation, branch, profile_name, config_path, format;
  std::optional<double> epsilon, kappa, m, D, x0, xmin, xmax, dmin, dmax;
  std::optional<long> n;
  std::optional<int> samples, periods, cells;
  std::string output, svg, suite = "all";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--profile", profile_name, "Named preset: fig1, fig3 or fig4");
    sub->add_option("--config", config_path, "JSON file in the output metadata schema");
    sub->add_option("--model", model, "free or lame");
    sub->add_option("--epsilon", epsilon, "Factorization energy eps1");
    sub->add_option("--kappa", kappa, "Free particle kappa1 (used when --epsilon is absent)");
    sub->add_option("--m", m, "Lame elliptic parameter, 0 < m < 1");
    sub->add_option("--x0", x0, "Free: centre of the well. Lame: translation of the seed");
    sub->add_option("--orientation", orientation, "Free seed: growing or decaying");
    sub->add_option("--branch", branch, "Lame seed: beta or inverse_beta");
    sub->add_option("--xmin", xmin, "Grid start");
    sub->add_option("--xmax", xmax, "Grid end");
    sub->add_option("--n", n, "Grid points");
    sub->add_option("--format", format, "csv or json");
    sub->add_option("--output,-o", output, "Output file (default: stdout or $" + std::string(output_dir_env) + ")");
  };
  auto* partner = app.add_subcommand("partner", "Partner potential and bound state on a grid");
  common(partner);
  partner->add_option("--D", D, "Integration constant D");
  partner->add_option("--svg", svg, "Also write an SVG chart to this path");
  auto* scan = app.add_subcommand("scan-d", "Flag each D of a range as singular or not");
  common(scan);
  scan->add_option("--D-min", dmin, "Smallest D");
  scan->add_option("--D-max", dmax, "Largest D");
  scan->add_option("--samples", samples, "Number of D values");
  auto* bands = app.add_subcommand("bands", "Analytic and numeric band edges of the Lame potential");
  bands->add_option("--m", m, "Elliptic parameter, 0 < m < 1");
  bands->add_option("--periods", periods, "Number of periods in the periodic problem");
  bands->add_option("--cells", cells, "Grid cells per period");
  bands->add_option("--format", format, "csv or json");
  bands->add_option("--output,-o", output, "Output file");
  auto* verify = app.add_subcommand("verify", "Run the invariant and oracle checks");
  verify->add_option("--suite", suite, "elliptic, free, lame or all");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.back()->help());
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << tool_version << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  try {
    RunConfig cfg = profile_name ? profile(*profile_name) : RunConfig{};
    if (config_path) {
      std::ifstream in(*config_path);
      if (!in) throw InputError("cannot read config file " + *config_path);
      try {
        json meta = json::parse(in);
        if (meta.is_object() && meta.contains("metadata")) meta = meta["metadata"];
        apply_config(cfg, meta);
      } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
      }
    }
    if (model) cfg.model = parse_model(*model);
    if (epsilon) cfg.epsilon1 = epsilon;
    if (kappa) {
      cfg.kappa1 = *kappa;
      if (!epsilon) cfg.epsilon1.reset();
    }
    if (m) cfg.m = *m;
    if (D) cfg.D = D;
    if (x0) {
      cfg.x0 = x0;
      if (!D && cfg.model == Model::free) cfg.D.reset();
    }
    if (orientation) cfg.orientation = *orientation;
    if (branch) cfg.branch = *branch;
    if (xmin) cfg.x_min = xmin;
    if (xmax) cfg.x_max = xmax;
    if (n) cfg.n_points = n;
    if (dmin) cfg.D_min = *dmin;
    if (dmax) cfg.D_max = *dmax;
    if (samples) cfg.samples = *samples;
    if (periods) cfg.periods = *periods;
    if (cells) cfg.cells_per_period = *cells;
    if (format) {
      if (*format == "csv")
        cfg.format = Format::csv;
      else if (*format == "json")
        cfg.format = Format::json;
      else
        throw InputError("unknown format '" + *format + "' (expected csv or json)");
    }
    cfg.output = output;
    cfg.svg = svg;
    cfg.suite = suite;

    if (*partner) {
      const Table t = partner_table(cfg);
      emit(cfg, t, std::string("partner_") + to_string(cfg.model), out, err);
      if (!cfg.svg.empty()) {
        std::ofstream file(cfg.svg, std::ios::binary);
        if (!file) throw InputError("cannot open svg file " + cfg.svg);
        write_svg(file, t);
      }
    } else if (*scan) {
      emit(cfg, scan_table(cfg), std::string("scan_") + to_string(cfg.model), out, err);
    } else if (*bands) {
      emit(cfg, bands_table(cfg), "bands", out, err);
    } else {
      return verify_command(cfg, out);
    }
    return 0;
  } catch (const SingularTransformError& e) {
    err << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DegenerateSeedError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace susyqm::cli
