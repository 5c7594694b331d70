// Command-line front end over the C API.
//
//   acefd validate <config>
//   acefd run <config>
//   acefd converge <config> --levels K
//   acefd compare <configA> <configB> ...
//
// Exit codes: 0 success, 2 invalid config, 3 invariant violated (validated
// mode), 4 numeric failure, 1 anything else.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "acefd/acefd.h"

namespace {

struct Overrides {
  bool allow_unsafe = false;
  std::string output_dir;
  std::string seed;
};

int exit_for(acefd_status s) {
  switch (s) {
    case ACEFD_OK:
      return 0;
    case ACEFD_E_CONFIG:
    case ACEFD_E_VALIDATION:
      return 2;
    case ACEFD_E_INVARIANT:
      return 3;
    case ACEFD_E_NUMERIC:
    case ACEFD_E_ITERATION:
      return 4;
    default:
      return 1;
  }
}

int report(acefd_status s) {
  std::fprintf(stderr, "acefd: %s: %s\n", acefd_status_string(s),
               acefd_last_error());
  return exit_for(s);
}

using ConfigPtr = std::unique_ptr<acefd_config, decltype(&acefd_config_destroy)>;

// Loads a config and applies command-line overrides. A missing or unreadable
// file counts as an invalid config.
acefd_status load(const std::string& path, const Overrides& o, ConfigPtr& out) {
  acefd_config* raw = nullptr;
  acefd_status s = acefd_config_load(path.c_str(), &raw);
  if (s == ACEFD_E_IO) s = ACEFD_E_CONFIG;
  if (s != ACEFD_OK) return s;
  out.reset(raw);
  if (o.allow_unsafe) {
    s = acefd_config_set(raw, "allow_unsafe", "true");
    if (s != ACEFD_OK) return s;
  }
  if (!o.output_dir.empty()) {
    s = acefd_config_set(raw, "output_dir", o.output_dir.c_str());
    if (s != ACEFD_OK) return s;
  }
  if (!o.seed.empty()) {
    s = acefd_config_set(raw, "seed", o.seed.c_str());
    if (s != ACEFD_OK) return s;
  }
  return ACEFD_OK;
}

std::string opt(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void print_result(const char* label, const acefd_run_result& r) {
  std::printf("%-12s status=%s steps=%ld/%ld max_abs=%.17g max_principle=%s "
              "energy_monotone=%s",
              label, acefd_status_string(r.status), r.steps_completed,
              r.steps_requested, r.max_abs_peak,
              r.max_principle_held ? "pass" : "fail",
              r.energy_monotone ? "pass" : "fail");
  if (r.has_error) {
    std::printf(" err_inf=%.6e err_l2=%.6e err_rms=%.6e", r.err_inf, r.err_l2,
                r.err_rms);
  }
  std::printf("\n");
}

int cmd_validate(const std::string& path, const Overrides& o) {
  ConfigPtr cfg(nullptr, acefd_config_destroy);
  acefd_status s = load(path, o, cfg);
  if (s != ACEFD_OK) return report(s);
  size_t len = 0;
  s = acefd_config_describe(cfg.get(), nullptr, 0, &len);
  if (s != ACEFD_OK) return report(s);
  std::string text(len + 1, '\0');
  acefd_config_describe(cfg.get(), text.data(), text.size(), &len);
  text.resize(len);
  std::printf("%sconfig ok\n", text.c_str());
  return 0;
}

int cmd_run(const std::string& path, const Overrides& o) {
  ConfigPtr cfg(nullptr, acefd_config_destroy);
  acefd_status s = load(path, o, cfg);
  if (s != ACEFD_OK) return report(s);
  acefd_run_result r{};
  s = acefd_run(cfg.get(), &r);
  if (s != ACEFD_OK && s != r.status) return report(s);
  print_result("run", r);
  if (r.status != ACEFD_OK) return report(r.status);
  return 0;
}

int cmd_converge(const std::string& path, int levels, const Overrides& o) {
  ConfigPtr cfg(nullptr, acefd_config_destroy);
  acefd_status s = load(path, o, cfg);
  if (s != ACEFD_OK) return report(s);
  std::vector<acefd_convergence_row> rows(static_cast<size_t>(levels));
  size_t count = 0;
  s = acefd_converge(cfg.get(), levels, rows.data(), rows.size(), &count);
  if (s != ACEFD_OK) return report(s);
  std::printf("%6s %12s %12s %8s %12s %12s %12s %8s %8s %8s\n", "N", "dx", "dt",
              "steps", "err_inf", "err_l2", "err_rms", "cr_inf", "cr_l2",
              "cr_rms");
  for (size_t i = 0; i < count && i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::printf("%6d %12.6e %12.6e %8ld %12.6e %12.6e %12.6e %8s %8s %8s\n",
                r.subdivisions, r.dx, r.dt, r.steps, r.err_inf, r.err_l2,
                r.err_rms, opt(r.cr_inf).c_str(), opt(r.cr_l2).c_str(),
                opt(r.cr_rms).c_str());
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths, const Overrides& o) {
  std::vector<ConfigPtr> owned;
  std::vector<const acefd_config*> raw;
  Overrides per_run = o;
  per_run.output_dir.clear();  // compare lays out its own subdirectories
  for (const auto& p : paths) {
    owned.emplace_back(nullptr, acefd_config_destroy);
    const acefd_status s = load(p, per_run, owned.back());
    if (s != ACEFD_OK) return report(s);
    raw.push_back(owned.back().get());
  }
  std::vector<acefd_run_result> results(raw.size());
  const acefd_status s =
      acefd_compare(raw.data(), raw.size(),
                    o.output_dir.empty() ? nullptr : o.output_dir.c_str(),
                    results.data());
  if (s != ACEFD_OK) return report(s);
  for (size_t i = 0; i < results.size(); ++i) {
    print_result(paths[i].c_str(), results[i]);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Allen-Cahn solver: runs, convergence studies, comparisons"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--allow-unsafe", o.allow_unsafe,
                  "skip parameter validation and runtime invariant aborts");
    sub->add_option("--output-dir", o.output_dir, "directory for outputs");
    sub->add_option("--seed", o.seed, "seed for random initial data");
  };

  std::string path;
  auto* validate = app.add_subcommand("validate", "check a config");
  validate->add_option("config", path, "config file")->required();
  add_common(validate);

  auto* run = app.add_subcommand("run", "run one simulation");
  run->add_option("config", path, "config file")->required();
  add_common(run);

  int levels = 0;
  auto* converge = app.add_subcommand("converge", "refinement study");
  converge->add_option("config", path, "config file")->required();
  converge->add_option("--levels", levels, "number of refinement levels")
      ->required()
      ->check(CLI::Range(2, 12));
  add_common(converge);

  std::vector<std::string> paths;
  auto* compare = app.add_subcommand("compare", "side-by-side scheme runs");
  compare->add_option("configs", paths, "config files")->required();
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*validate) return cmd_validate(path, o);
  if (*run) return cmd_run(path, o);
  if (*converge) return cmd_converge(path, levels, o);
  if (*compare) return cmd_compare(paths, o);
  return 1;
}
