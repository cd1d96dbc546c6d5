#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rham/rham.h"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::string> seed;
  std::optional<std::string> samples;
  std::vector<std::string> regularities;
  std::optional<std::string> out;
  bool plot = false;
  std::vector<std::string> sets;
};

int fail(rham_status s) {
  std::fprintf(stderr, "error: %s: %s\n", rham_status_name(s), rham_last_error());
  return 1 + static_cast<int>(s) % 100;
}

int run(const std::string& command, const Options& o) {
  std::string text;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) {
      std::fprintf(stderr, "error: IOFailure: cannot read %s\n", o.config_path.c_str());
      return 1 + RHAM_IO_FAILURE;
    }
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  rham_config* cfg = nullptr;
  if (rham_status s = rham_config_parse(command.c_str(), text.c_str(), &cfg); s != RHAM_OK) {
    return fail(s);
  }

  std::vector<std::pair<std::string, std::string>> overrides;
  if (o.seed) overrides.emplace_back("seed", *o.seed);
  if (o.samples) overrides.emplace_back("samples", *o.samples);
  if (!o.regularities.empty()) {
    std::string joined;
    for (const auto& r : o.regularities) joined += (joined.empty() ? "" : ",") + r;
    overrides.emplace_back("regularity", joined);
  }
  if (o.out) overrides.emplace_back("out", *o.out);
  if (o.plot) overrides.emplace_back("plot", "true");
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      rham_config_free(cfg);
      return 1 + RHAM_PARSE_ERROR;
    }
    overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& [k, v] : overrides) {
    if (rham_status s = rham_config_set(cfg, k.c_str(), v.c_str()); s != RHAM_OK) {
      rham_config_free(cfg);
      return fail(s);
    }
  }

  char* summary = nullptr;
  const rham_status s = rham_run(cfg, &summary);
  rham_config_free(cfg);
  if (s != RHAM_OK) return fail(s);
  std::fputs(summary, stdout);
  rham_string_free(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Hamiltonian diffeomorphisms of the flat torus"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rham_version());

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sample-field", "Sample one Hamiltonian and tabulate it on a lattice"},
      {"flow", "Advect the reference curve by sampled time-one maps"},
      {"diffusion", "Push a ball of points forward and measure equidistribution"},
      {"intersections", "Mean crossing counts of the advected curve with test curves"},
      {"random-walk", "Trajectories of the autonomous-step random walk"},
      {"rkhs-norm", "RKHS norms of sampled Hamiltonians"},
      {"tails", "Oscillation tail statistics and sub-Gaussian fit"},
      {"concentration", "Mean oscillation per regularity"},
      {"inversion", "Two-sample test of forward against inverse displacement"},
  };

  Options opts;
  std::string chosen;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "Master seed");
    sub->add_option("--samples", opts.samples, "Sample count");
    sub->add_option("--regularity", opts.regularities, "Regularity r (repeatable)");
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_flag("--plot", opts.plot, "Also write SVG figures");
    sub->add_option("--set", opts.sets, "Override any config key: key=value (repeatable)");
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  CLI11_PARSE(app, argc, argv);
  return run(chosen, opts);
}
