#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

#include "rham/config.hpp"
#include "rham/error.hpp"
#include "rham/io.hpp"
#include "rham/rkhs.hpp"

namespace rham {

// --- commands -----------------------------------------------------------------

namespace {

struct CommandName {
  Command command;
  const char* name;
};

constexpr CommandName kCommands[] = {
    {Command::SampleField, "sample-field"}, {Command::Flow, "flow"},
    {Command::Diffusion, "diffusion"},      {Command::Intersections, "intersections"},
    {Command::RandomWalk, "random-walk"},   {Command::RkhsNorm, "rkhs-norm"},
    {Command::Tails, "tails"},              {Command::Concentration, "concentration"},
    {Command::Inversion, "inversion"},
};

}  // namespace

const char* to_string(Command c) noexcept {
  for (const auto& e : kCommands)
    if (e.command == c) return e.name;
  return "?";
}

Command parse_command(const std::string& name) {
  for (const auto& e : kCommands)
    if (name == e.name) return e.command;
  throw Error(ErrorCode::ValidationError, "command");
}

// --- config -------------------------------------------------------------------

namespace {

[[noreturn]] void invalid(const std::string& field) { throw Error(ErrorCode::ValidationError, field); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) invalid(key);
    return d;
  } catch (const std::logic_error&) {
    invalid(key);
  }
}

long long to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) invalid(key);
    return i;
  } catch (const std::logic_error&) {
    invalid(key);
  }
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
  if (v.empty() || v[0] == '-') invalid(key);
  try {
    std::size_t pos = 0;
    const unsigned long long i = std::stoull(v, &pos);
    if (pos != v.size()) invalid(key);
    return i;
  } catch (const std::logic_error&) {
    invalid(key);
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  invalid(key);
}

int to_int_in(const std::string& v, const std::string& key, long long lo) {
  const long long i = to_int(v, key);
  if (i < lo || i > 1'000'000'000LL) invalid(key);
  return static_cast<int>(i);
}

std::string fmt_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string join_doubles(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt_double(xs[i]);
  return s;
}

struct Key {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<std::pair<std::string, Key>>& keys() {
  using C = ExperimentConfig;
  static const std::vector<std::pair<std::string, Key>> table = {
      {"regularity",
       {[](C& c, const std::string& v) {
          std::vector<double> rs;
          for (const auto& item : split_list(v)) rs.push_back(to_double(item, "regularity"));
          if (rs.empty()) invalid("regularity");
          c.regularities = rs;
        },
        [](const C& c) { return join_doubles(c.regularities); }}},
      {"spatial_max",
       {[](C& c, const std::string& v) { c.truncation.spatial_max = to_int_in(v, "spatial_max", 1); },
        [](const C& c) { return std::to_string(c.truncation.spatial_max); }}},
      {"include_axis_modes",
       {[](C& c, const std::string& v) { c.truncation.include_axis_modes = to_bool(v, "include_axis_modes"); },
        [](const C& c) { return std::string(c.truncation.include_axis_modes ? "true" : "false"); }}},
      {"temporal_max",
       {[](C& c, const std::string& v) { c.truncation.temporal_max = to_int_in(v, "temporal_max", 1); },
        [](const C& c) { return std::to_string(c.truncation.temporal_max); }}},
      {"kernel",
       {[](C& c, const std::string& v) { c.kernel = parse_kernel_tag(v); },
        [](const C& c) { return std::string(to_string(c.kernel)); }}},
      {"per_mode_scale",
       {[](C& c, const std::string& v) { c.per_mode_scale = to_double(v, "per_mode_scale"); },
        [](const C& c) { return fmt_double(c.per_mode_scale); }}},
      {"mean_offset",
       {[](C& c, const std::string& v) { c.mean_offset = to_double(v, "mean_offset"); },
        [](const C& c) { return fmt_double(c.mean_offset); }}},
      {"d1_grid_nodes",
       {[](C& c, const std::string& v) { c.d1_grid_nodes = to_int_in(v, "d1_grid_nodes", 2); },
        [](const C& c) { return std::to_string(c.d1_grid_nodes); }}},
      {"samples",
       {[](C& c, const std::string& v) { c.samples = to_int_in(v, "samples", 1); },
        [](const C& c) { return std::to_string(c.samples); }}},
      {"steps",
       {[](C& c, const std::string& v) { c.flow.steps = to_int_in(v, "steps", 1); },
        [](const C& c) { return std::to_string(c.flow.steps); }}},
      {"refinement_threshold",
       {[](C& c, const std::string& v) { c.flow.refinement_threshold = to_double(v, "refinement_threshold"); },
        [](const C& c) { return fmt_double(c.flow.refinement_threshold); }}},
      {"max_refinement_depth",
       {[](C& c, const std::string& v) { c.flow.max_refinement_depth = to_int_in(v, "max_refinement_depth", 0); },
        [](const C& c) { return std::to_string(c.flow.max_refinement_depth); }}},
      {"seed",
       {[](C& c, const std::string& v) { c.seed = to_u64(v, "seed"); },
        [](const C& c) { return std::to_string(c.seed); }}},
      {"out",
       {[](C& c, const std::string& v) { c.out_dir = v; }, [](const C& c) { return c.out_dir; }}},
      {"plot",
       {[](C& c, const std::string& v) { c.plot = to_bool(v, "plot"); },
        [](const C& c) { return std::string(c.plot ? "true" : "false"); }}},
      {"lagrangians",
       {[](C& c, const std::string& v) {
          c.lagrangians = split_list(v);
          if (c.lagrangians.empty()) invalid("lagrangians");
        },
        [](const C& c) {
          std::string s;
          for (std::size_t i = 0; i < c.lagrangians.size(); ++i) s += (i ? "," : "") + c.lagrangians[i];
          return s;
        }}},
      {"curve_vertices",
       {[](C& c, const std::string& v) { c.curve_vertices = to_int_in(v, "curve_vertices", 3); },
        [](const C& c) { return std::to_string(c.curve_vertices); }}},
      {"points",
       {[](C& c, const std::string& v) { c.points = to_int_in(v, "points", 1); },
        [](const C& c) { return std::to_string(c.points); }}},
      {"ball_center_x",
       {[](C& c, const std::string& v) { c.ball_center_x = to_double(v, "ball_center_x"); },
        [](const C& c) { return fmt_double(c.ball_center_x); }}},
      {"ball_center_y",
       {[](C& c, const std::string& v) { c.ball_center_y = to_double(v, "ball_center_y"); },
        [](const C& c) { return fmt_double(c.ball_center_y); }}},
      {"ball_radius",
       {[](C& c, const std::string& v) { c.ball_radius = to_double(v, "ball_radius"); },
        [](const C& c) { return fmt_double(c.ball_radius); }}},
      {"times",
       {[](C& c, const std::string& v) {
          std::vector<double> ts;
          for (const auto& item : split_list(v)) ts.push_back(to_double(item, "times"));
          if (ts.empty()) invalid("times");
          c.times = ts;
        },
        [](const C& c) { return join_doubles(c.times); }}},
      {"grid",
       {[](C& c, const std::string& v) { c.grid = to_int_in(v, "grid", 1); },
        [](const C& c) { return std::to_string(c.grid); }}},
      {"osc_spatial_grid",
       {[](C& c, const std::string& v) { c.osc_spatial_grid = to_int_in(v, "osc_spatial_grid", 2); },
        [](const C& c) { return std::to_string(c.osc_spatial_grid); }}},
      {"osc_time_grid",
       {[](C& c, const std::string& v) { c.osc_time_grid = to_int_in(v, "osc_time_grid", 2); },
        [](const C& c) { return std::to_string(c.osc_time_grid); }}},
      {"walk_steps",
       {[](C& c, const std::string& v) { c.walk_steps = to_int_in(v, "walk_steps", 0); },
        [](const C& c) { return std::to_string(c.walk_steps); }}},
      {"probe_x",
       {[](C& c, const std::string& v) { c.probe_x = to_double(v, "probe_x"); },
        [](const C& c) { return fmt_double(c.probe_x); }}},
      {"probe_y",
       {[](C& c, const std::string& v) { c.probe_y = to_double(v, "probe_y"); },
        [](const C& c) { return fmt_double(c.probe_y); }}},
      {"weighted_sum_eps",
       {[](C& c, const std::string& v) { c.weighted_sum_eps = to_double(v, "weighted_sum_eps"); },
        [](const C& c) { return fmt_double(c.weighted_sum_eps); }}},
      {"arrow_grid",
       {[](C& c, const std::string& v) { c.arrow_grid = to_int_in(v, "arrow_grid", 2); },
        [](const C& c) { return std::to_string(c.arrow_grid); }}},
  };
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& [k, v] : keys())
    if (k == name) return &v;
  return nullptr;
}

ExperimentConfig defaults_for(Command command) {
  ExperimentConfig c;
  c.command = command;
  switch (command) {
    case Command::Intersections: c.samples = 600; c.regularities = {0.14}; break;
    case Command::Tails: c.samples = 2000; break;
    case Command::Concentration: c.samples = 200; c.regularities = {0.04, 0.08, 0.14, 0.5, 1.0}; break;
    case Command::Inversion: c.samples = 500; break;
    case Command::Diffusion: c.regularities = {0.08}; break;
    case Command::Flow: c.samples = 12; c.regularities = {0.14}; break;
    case Command::SampleField: c.samples = 1; c.regularities = {0.08}; break;
    case Command::RandomWalk: c.kernel = KernelTag::D3Autonomous; break;
    case Command::RkhsNorm: break;
  }
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  for (double r : regularities)
    if (!(r > 0.0) || !std::isfinite(r)) invalid("regularity");
  if (regularities.empty()) invalid("regularity");
  truncation.validate();
  if (!(per_mode_scale > 0.0)) invalid("per_mode_scale");
  if (d1_grid_nodes < 2) invalid("d1_grid_nodes");
  if (samples < 1) invalid("samples");
  flow.validate();
  for (const auto& l : lagrangians) {
    bool known = false;
    for (const auto& s : standard_lagrangians()) known = known || s.label == l;
    if (!known) invalid("lagrangians");
  }
  if (curve_vertices < 3) invalid("curve_vertices");
  if (points < 1) invalid("points");
  if (!(ball_radius > 0.0 && ball_radius < 0.5)) invalid("ball_radius");
  for (double t : times)
    if (!(t >= 0.0 && t <= 1.0)) invalid("times");
  if (grid < 1) invalid("grid");
  if (osc_spatial_grid < 2) invalid("osc_spatial_grid");
  if (osc_time_grid < 2) invalid("osc_time_grid");
  if (walk_steps < 0) invalid("walk_steps");
  if (!(weighted_sum_eps > 0.0)) invalid("weighted_sum_eps");
  if (arrow_grid < 2) invalid("arrow_grid");
  if (command == Command::Tails && samples < 1000) invalid("samples");
}

LawDefiningConfig ExperimentConfig::law(std::size_t i) const {
  LawDefiningConfig law;
  law.regularity = regularities.at(i);
  law.truncation = truncation;
  law.kernel.tag = kernel;
  law.kernel.per_mode_scale = per_mode_scale;
  law.kernel.mean_offset = mean_offset;
  law.kernel.d1_grid_nodes = d1_grid_nodes;
  law.kernel.regularity = law.regularity;
  law.kernel.temporal_max = truncation.temporal_max;
  law.seed = seed;
  return law;
}

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const Key* k = find_key(key);
  if (!k) throw Error(ErrorCode::ParseError, "unknown key '" + key + "'");
  k->set(config, value);
  config.validate();
}

ExperimentConfig parse_config(const std::string& text, Command command) {
  ExperimentConfig c = defaults_for(command);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Key* k = find_key(key);
    if (!k) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (auto it = seen.find(key); it != seen.end()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": key '" + key +
                                             "' repeats line " + std::to_string(it->second));
    }
    seen[key] = lineno;
    k->set(c, value);
  }
  c.validate();
  return c;
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string s = "# effective configuration for command: ";
  s += to_string(config.command);
  s += "\n";
  for (const auto& [name, k] : keys()) s += name + " = " + k.get(config) + "\n";
  return s;
}

// --- tables -------------------------------------------------------------------

namespace {

std::string g6(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", d);
  return buf;
}

}  // namespace

std::string format_table(const ResultTable& table) {
  ResultTable sorted = table;
  sorted.sort();
  std::string s = "label,regularity,estimate,stderr,samples\n";
  for (const auto& r : sorted.rows) {
    s += r.label + "," + g6(r.regularity) + "," + g6(r.estimate) + "," + g6(r.standard_error) +
         "," + std::to_string(r.samples) + "\n";
  }
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IOFailure, "write failed: " + path);
}

void write_table(const ResultTable& table, const std::string& path) {
  write_text(path, format_table(table));
}

ResultTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "label,regularity,estimate,stderr,samples") {
    throw Error(ErrorCode::ParseError, path + ": bad table header");
  }
  ResultTable t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 5) {
      throw Error(ErrorCode::ParseError, path + ": line " + std::to_string(lineno) + " needs 5 fields");
    }
    try {
      t.rows.push_back({f[0], std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), std::stol(f[4])});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::ParseError, path + ": line " + std::to_string(lineno) + " is malformed");
    }
  }
  return t;
}

// --- SVG -----------------------------------------------------------------------

namespace {

constexpr double kCanvas = 600.0;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
                                    "#393b79", "#637939"};

std::string num(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", d);
  return buf;
}

std::string svg_open() {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"0 0 600 600\">\n"
         "<rect x=\"0\" y=\"0\" width=\"600\" height=\"600\" fill=\"white\" stroke=\"black\"/>\n";
}

// Unit-square coordinates to canvas, y up.
double sx(double x) { return x * kCanvas; }
double sy(double y) { return (1.0 - y) * kCanvas; }

}  // namespace

std::string field_svg(const HamiltonianField& h, double t, int arrow_grid) {
  const int n = arrow_grid;
  std::vector<Vec2> pts;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) pts.push_back({(a + 0.5) / n, (b + 0.5) / n});
  std::vector<Vec2> v(pts.size());
  h.vector_field(t, pts, v);
  double vmax = 0.0;
  for (const Vec2& x : v) vmax = std::max(vmax, x.norm());
  const double spacing = 1.0 / n;

  std::string s = svg_open();
  s += "<g stroke=\"black\" fill=\"black\" stroke-width=\"1\">\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double mag = vmax > 0.0 ? v[i].norm() / vmax : 0.0;
    if (mag == 0.0) {
      s += "<circle cx=\"" + num(sx(pts[i].x)) + "\" cy=\"" + num(sy(pts[i].y)) + "\" r=\"1\"/>\n";
      continue;
    }
    // Longest arrow spans 90% of the lattice spacing.
    const double len = 0.9 * spacing * mag;
    const Vec2 dir = (1.0 / v[i].norm()) * v[i];
    const Vec2 tail = pts[i] - (0.5 * len) * dir;
    const Vec2 tip = pts[i] + (0.5 * len) * dir;
    const Vec2 side{-dir.y, dir.x};
    const double head = 0.3 * len;
    const Vec2 l = tip - head * dir + (0.5 * head) * side;
    const Vec2 r = tip - head * dir - (0.5 * head) * side;
    s += "<line x1=\"" + num(sx(tail.x)) + "\" y1=\"" + num(sy(tail.y)) + "\" x2=\"" +
         num(sx(tip.x)) + "\" y2=\"" + num(sy(tip.y)) + "\"/>\n";
    s += "<polygon points=\"" + num(sx(tip.x)) + "," + num(sy(tip.y)) + " " + num(sx(l.x)) + "," +
         num(sy(l.y)) + " " + num(sx(r.x)) + "," + num(sy(r.y)) + "\"/>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

void render_field_svg(const HamiltonianField& h, double t, const std::string& path,
                      int arrow_grid) {
  write_text(path, field_svg(h, t, arrow_grid));
}

std::string curves_svg(const std::vector<LagrangianCurve>& curves) {
  std::string s = svg_open();
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& v = curves[c].vertices;
    std::string d;
    if (!v.empty()) {
      auto cell = [](Vec2 p) { return std::pair<double, double>{std::floor(p.x), std::floor(p.y)}; };
      auto moveto = [&](Vec2 p, std::pair<double, double> base) {
        d += "M" + num(sx(p.x - base.first)) + " " + num(sy(p.y - base.second)) + " ";
      };
      auto lineto = [&](Vec2 p, std::pair<double, double> base) {
        d += "L" + num(sx(p.x - base.first)) + " " + num(sy(p.y - base.second)) + " ";
      };
      auto base = cell(v[0]);
      moveto(v[0], base);
      for (std::size_t i = 1; i < v.size(); ++i) {
        Vec2 a = v[i - 1];
        const Vec2 b = v[i];
        // Split the segment wherever it leaves the current fundamental domain.
        for (int guard = 0; guard < 8 && cell(b) != base; ++guard) {
          double tx = 2.0, ty = 2.0;
          const Vec2 dd = b - a;
          if (std::floor(b.x) != base.first && dd.x != 0.0)
            tx = ((dd.x > 0 ? base.first + 1.0 : base.first) - a.x) / dd.x;
          if (std::floor(b.y) != base.second && dd.y != 0.0)
            ty = ((dd.y > 0 ? base.second + 1.0 : base.second) - a.y) / dd.y;
          const double tcut = std::clamp(std::min(tx, ty), 0.0, 1.0);
          const Vec2 cut = a + tcut * dd;
          lineto(cut, base);
          if (tx <= ty) base.first += dd.x > 0 ? 1.0 : -1.0;
          if (ty <= tx) base.second += dd.y > 0 ? 1.0 : -1.0;
          moveto(cut, base);
          a = cut;
        }
        lineto(b, base);
      }
    }
    s += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" +
         kPalette[c % (sizeof kPalette / sizeof kPalette[0])] + "\" stroke-width=\"1.2\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

void render_curves_svg(const std::vector<LagrangianCurve>& curves, const std::string& path) {
  write_text(path, curves_svg(curves));
}

std::string histogram_svg(const std::vector<double>& values, int bins, const std::string& title) {
  bins = std::max(bins, 1);
  std::string s = svg_open();
  s += "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";
  if (!values.empty()) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double width = std::max(*hi_it - lo, 1e-300);
    std::vector<int> counts(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
      const int b = std::min(bins - 1, static_cast<int>((v - lo) / width * bins));
      ++counts[static_cast<std::size_t>(b)];
    }
    const int cmax = *std::max_element(counts.begin(), counts.end());
    const double bw = (kCanvas - 40.0) / bins;
    for (int b = 0; b < bins; ++b) {
      const double h = (kCanvas - 60.0) * counts[static_cast<std::size_t>(b)] / cmax;
      s += "<rect x=\"" + num(20.0 + b * bw) + "\" y=\"" + num(kCanvas - 20.0 - h) + "\" width=\"" +
           num(bw) + "\" height=\"" + num(h) + "\" fill=\"#1f77b4\" stroke=\"white\"/>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

void render_histogram_svg(const std::vector<double>& values, int bins, const std::string& title,
                          const std::string& path) {
  write_text(path, histogram_svg(values, bins, title));
}

// --- command dispatch ------------------------------------------------------------

namespace {

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

std::string run_sample_field(const ExperimentConfig& c) {
  const LawDefiningConfig law = c.law(0);
  RandomStream rng = RandomStream::derive(c.seed, {0});
  const RandomHamiltonian h = sample_hamiltonian(law, rng);
  const double osc = osc_estimate(h, c.osc_spatial_grid, c.osc_time_grid);
  std::string csv = "t,x,y,h,vx,vy\n";
  const int n = c.arrow_grid;
  char buf[256];
  for (double t : c.times) {
    for (int b = 0; b < n; ++b) {
      for (int a = 0; a < n; ++a) {
        const Vec2 p{static_cast<double>(a) / n, static_cast<double>(b) / n};
        const Vec2 v = h.vector_field(t, p);
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.9g,%.9g,%.9g\n", t, p.x, p.y,
                      h.value(t, p), v.x, v.y);
        csv += buf;
      }
    }
  }
  write_text(join_path(c.out_dir, "field.csv"), csv);
  std::string summary = "modes=" + std::to_string(h.basis().size());
  if (law.kernel.tag != KernelTag::D1Sqexp) {
    summary += " gaussian_dimension=" + std::to_string(gaussian_dimension(law));
  }
  summary += " osc=" + g6(osc) + "\n";
  if (c.plot) {
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      render_field_svg(h, c.times[i], join_path(c.out_dir, "field_t" + std::to_string(i) + ".svg"),
                       c.arrow_grid);
    }
  }
  return summary;
}

std::string run_flow(const ExperimentConfig& c) {
  const LawDefiningConfig law = c.law(0);
  const auto basis = std::make_shared<const SpectralBasis>(c.truncation);
  const LagrangianCurve k = reference_curve(c.curve_vertices);
  std::vector<LagrangianCurve> curves(static_cast<std::size_t>(c.samples));
  parallel_for(curves.size(), [&](std::size_t i) {
    RandomStream rng = RandomStream::derive(c.seed, {i});
    const RandomHamiltonian h = sample_hamiltonian(law, basis, rng);
    curves[i] = advect_curve(h, k, 1.0, c.flow);
  });
  std::string jsonl;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    nlohmann::json rec;
    rec["sample"] = i;
    rec["vertices"] = curves[i].vertices.size();
    nlohmann::json xs = nlohmann::json::array(), ys = nlohmann::json::array();
    for (const Vec2& v : curves[i].vertices) {
      xs.push_back(v.x);
      ys.push_back(v.y);
    }
    rec["x"] = xs;
    rec["y"] = ys;
    jsonl += rec.dump() + "\n";
  }
  write_text(join_path(c.out_dir, "curves.jsonl"), jsonl);
  if (c.plot) render_curves_svg(curves, join_path(c.out_dir, "curves.svg"));
  return "advected " + std::to_string(curves.size()) + " curves\n";
}

std::string run_intersections_cmd(const ExperimentConfig& c) {
  const IntersectionRun run = run_intersections(c);
  write_table(run.table, join_path(c.out_dir, "intersections.csv"));
  std::string jsonl;
  for (std::size_t ri = 0; ri < run.counts.size(); ++ri) {
    for (std::size_t i = 0; i < run.counts[ri].size(); ++i) {
      nlohmann::json rec;
      rec["regularity"] = c.regularities[ri];
      rec["sample"] = i;
      for (std::size_t j = 0; j < c.lagrangians.size(); ++j) {
        rec["counts"][c.lagrangians[j]] = run.counts[ri][i][j];
      }
      jsonl += rec.dump() + "\n";
    }
  }
  write_text(join_path(c.out_dir, "intersections.jsonl"), jsonl);
  if (c.plot) render_curves_svg(run.example_curves, join_path(c.out_dir, "curves.svg"));
  std::string s = format_table(run.table);
  for (const auto& f : run.failures) {
    s += "failure r=" + g6(f.regularity) + " sample=" + std::to_string(f.sample) + ": " + f.message + "\n";
  }
  return s;
}

std::string run_diffusion_cmd(const ExperimentConfig& c) {
  const DiffusionResult d = run_diffusion(c);
  std::string csv = "time,chi_square\n";
  std::string grid = "time,cell_x,cell_y,count\n";
  for (std::size_t ti = 0; ti < d.times.size(); ++ti) {
    csv += g6(d.times[ti]) + "," + g6(d.chi_square[ti]) + "\n";
    for (int cy = 0; cy < d.grid; ++cy)
      for (int cx = 0; cx < d.grid; ++cx)
        grid += g6(d.times[ti]) + "," + std::to_string(cx) + "," + std::to_string(cy) + "," +
                std::to_string(d.grid_counts[ti][static_cast<std::size_t>(cy * d.grid + cx)]) + "\n";
  }
  write_text(join_path(c.out_dir, "diffusion.csv"), csv);
  write_text(join_path(c.out_dir, "diffusion_grid.csv"), grid);
  return csv;
}

std::string run_walk_cmd(const ExperimentConfig& c) {
  const WalkRun run = run_walks(c);
  std::string csv = "walk,step,x,y\n";
  char buf[128];
  for (std::size_t w = 0; w < run.trajectories.size(); ++w) {
    for (std::size_t i = 0; i < run.trajectories[w].size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.9g,%.9g\n", w, i, run.trajectories[w][i].x(),
                    run.trajectories[w][i].y());
      csv += buf;
    }
  }
  write_text(join_path(c.out_dir, "walks.csv"), csv);
  return "wrote " + std::to_string(run.trajectories.size()) + " walks\n";
}

std::string run_tails_cmd(const ExperimentConfig& c) {
  const TailResult t = run_tail_stats(c);
  std::string csv = "u,survival\n";
  for (std::size_t i = 0; i < t.u.size(); ++i) csv += g6(t.u[i]) + "," + g6(t.survival[i]) + "\n";
  write_text(join_path(c.out_dir, "tails.csv"), csv);
  std::string jsonl;
  for (std::size_t i = 0; i < t.osc_values.size(); ++i) {
    jsonl += nlohmann::json{{"sample", i}, {"osc", t.osc_values[i]}}.dump() + "\n";
  }
  write_text(join_path(c.out_dir, "osc.jsonl"), jsonl);
  if (c.plot) render_histogram_svg(t.osc_values, 40, "osc", join_path(c.out_dir, "osc_histogram.svg"));
  return "R=" + g6(t.fit_R) + " C=" + g6(t.fit_C) + " u=" + g6(t.held_out_u) +
         " held_out=" + g6(t.held_out_fraction) + " bound=" + g6(t.bound) +
         (t.dominated ? " dominated\n" : " NOT dominated\n");
}

std::string run_inversion_cmd(const ExperimentConfig& c) {
  const InversionResult r = run_inversion_test(c);
  const std::string line = "statistic,p_value,passed\n" + g6(r.ks.statistic) + "," +
                           g6(r.ks.p_value) + "," + (r.passed ? "true" : "false") + "\n";
  write_text(join_path(c.out_dir, "inversion.csv"), line);
  if (c.plot) {
    render_histogram_svg(r.forward, 30, "d(p, phi(p))", join_path(c.out_dir, "forward.svg"));
    render_histogram_svg(r.inverse, 30, "d(p, phi^-1(p))", join_path(c.out_dir, "inverse.svg"));
  }
  return line;
}

}  // namespace

std::string run_command(const ExperimentConfig& config) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw Error(ErrorCode::IOFailure, "cannot create " + config.out_dir + ": " + ec.message());
  write_text(join_path(config.out_dir, "config.txt"), serialize_config(config));

  switch (config.command) {
    case Command::SampleField: return run_sample_field(config);
    case Command::Flow: return run_flow(config);
    case Command::Diffusion: return run_diffusion_cmd(config);
    case Command::Intersections: return run_intersections_cmd(config);
    case Command::RandomWalk: return run_walk_cmd(config);
    case Command::RkhsNorm: {
      const ResultTable t = run_rkhs(config);
      write_table(t, join_path(config.out_dir, "rkhs.csv"));
      return format_table(t);
    }
    case Command::Tails: return run_tails_cmd(config);
    case Command::Concentration: {
      const ResultTable t = run_concentration(config);
      write_table(t, join_path(config.out_dir, "concentration.csv"));
      return format_table(t);
    }
    case Command::Inversion: return run_inversion_cmd(config);
  }
  return {};
}

}  // namespace rham
