#include "acefd/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <json.hpp>
#include <set>
#include <sstream>

#include "acefd/baselines.hpp"
#include "acefd/error.hpp"
#include "acefd/kinetic.hpp"
#include "acefd/problems.hpp"

namespace fs = std::filesystem;

namespace acefd {

const char* to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::kOk:
      return "ok";
    case RunStatus::kInvariantViolated:
      return "invariant_violated";
    case RunStatus::kNumericFailure:
      return "numeric_failure";
    case RunStatus::kIterationFailure:
      return "iteration_failure";
  }
  return "unknown";
}

int exit_code(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::kOk:
      return 0;
    case RunStatus::kInvariantViolated:
      return 3;
    case RunStatus::kNumericFailure:
    case RunStatus::kIterationFailure:
      return 4;
  }
  return 1;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : std::string();
}

void write_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create " + target.parent_path().string());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path);
}

bool curvature_problem(ProblemKind kind) {
  return kind == ProblemKind::kCircle2D || kind == ProblemKind::kSphere3D;
}

RadiusRecord radius_at(const ScalarField& phi, const ProblemSpec& problem,
                       double t) {
  RadiusRecord r;
  r.t = t;
  try {
    r.radius = extract_radius(phi);
  } catch (const ExtinctionError&) {
  }
  r.expected = expected_radius(t, problem.radius0, problem.eps_interface,
                               phi.spec().dim());
  return r;
}

std::string snapshot_name(long step, SnapshotFormat format) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "snapshot_%08ld.%s", step,
                format == SnapshotFormat::kCsv ? "csv" : "bin");
  return buf;
}

void write_snapshot(const std::string& path, const ScalarField& field,
                    SnapshotFormat format) {
  if (format == SnapshotFormat::kCsv) {
    write_snapshot_csv(path, field);
  } else {
    write_snapshot_binary(path, field);
  }
}

std::string radius_csv(const std::vector<RadiusRecord>& rows) {
  std::string s = "t,radius,expected\n";
  for (const auto& r : rows) {
    s += fmt(r.t) + "," + fmt_opt(r.radius) + "," + fmt_opt(r.expected) + "\n";
  }
  return s;
}

}  // namespace

RunSummary run(const RunConfig& config) {
  validate_run_config(config);
  const auto start = std::chrono::steady_clock::now();

  const GridSpec spec = config.grid();
  const SchemeParams params = config.params();
  ProblemSpec problem = config.problem;
  if (config.eps_ratio) problem.eps_interface = params.eps_interface;
  const bool validated = !config.allow_unsafe;
  const bool curvature = curvature_problem(problem.kind);

  RunSummary s;
  s.label = config.label;
  s.scheme = config.scheme;
  s.steps_requested = config.step_count();

  std::set<long> snapshot_steps;
  for (double t : config.snapshot_times) {
    snapshot_steps.insert(std::lround(t / config.dt));
  }
  const bool writing = !config.output_dir.empty();
  const fs::path dir(config.output_dir);

  ScalarField phi = initial_field(problem, spec);
  ScalarField next(spec);
  std::optional<kinetic::LatticeModel> model;
  std::optional<kinetic::DistributionField> dist;
  if (config.scheme == SchemeKind::kKinetic) {
    model.emplace(params);
    dist.emplace(kinetic::equilibrium_field(phi, *model));
  }

  double energy = discrete_energy(phi, params);
  s.max_abs_peak = phi.max_abs();
  s.energy.push_back({0.0, energy, s.max_abs_peak});
  if (curvature) s.radius.push_back(radius_at(phi, problem, 0.0));
  if (writing && snapshot_steps.count(0)) {
    write_snapshot((dir / snapshot_name(0, config.snapshot_format)).string(),
                   phi, config.snapshot_format);
  }

  for (long n = 1; n <= s.steps_requested; ++n) {
    try {
      switch (config.scheme) {
        case SchemeKind::kRlbMieFd: {
          const StepReport r = step(phi, next, params);
          s.newton_fallbacks += r.newton_fallback_count;
          std::swap(phi, next);
          break;
        }
        case SchemeKind::kKinetic: {
          kinetic::KineticReport r;
          *dist = kinetic::kinetic_step(*dist, params, *model, &r);
          s.newton_fallbacks += r.step.newton_fallback_count;
          phi = kinetic::moment_phi(*dist);
          break;
        }
        case SchemeKind::kFexFd:
          phi = baselines::fex_fd_step(phi, params);
          break;
        case SchemeKind::kCrankNicolson:
          phi = baselines::cn_step(phi, params, config.newton);
          break;
      }
      const std::size_t bad = phi.first_non_finite();
      if (bad != phi.size()) {
        throw NumericError("non-finite value at node " + std::to_string(bad),
                           bad);
      }
    } catch (const InvariantError& e) {
      s.status = RunStatus::kInvariantViolated;
      s.message = "step " + std::to_string(n) + ": " + e.what();
      s.max_principle_held = false;
      break;
    } catch (const NumericError& e) {
      s.status = RunStatus::kNumericFailure;
      s.message = "step " + std::to_string(n) + ": " + e.what();
      s.max_abs_peak = std::numeric_limits<double>::infinity();
      s.max_principle_held = false;
      break;
    } catch (const IterationError& e) {
      s.status = RunStatus::kIterationFailure;
      s.message = "step " + std::to_string(n) + ": " + e.what();
      break;
    }
    s.steps_completed = n;
    const double t = n * config.dt;
    const double max_abs = phi.max_abs();
    const double previous = energy;
    energy = discrete_energy(phi, params);
    s.energy.push_back({t, energy, max_abs});
    s.max_abs_peak = std::fmax(s.max_abs_peak, max_abs);
    if (curvature) s.radius.push_back(radius_at(phi, problem, t));
    if (writing && snapshot_steps.count(n)) {
      write_snapshot((dir / snapshot_name(n, config.snapshot_format)).string(),
                     phi, config.snapshot_format);
    }

    std::ostringstream why;
    if (max_abs > 1.0 + kMaxNormSlack) {
      if (s.max_principle_held) {
        why << "max norm " << fmt(max_abs) << " exceeds 1 at step " << n;
      }
      s.max_principle_held = false;
    }
    const double increase = energy - previous;
    if (!(increase <= kEnergyTolerance * std::fmax(1.0, std::fabs(previous)))) {
      if (s.energy_monotone) {
        s.first_energy_increase = n;
        if (!why.str().empty()) why << "; ";
        why << "energy rose by " << fmt(increase) << " at step " << n;
      }
      s.energy_monotone = false;
    }
    if (!(increase <= s.worst_energy_increase)) {
      s.worst_energy_increase = increase;
    }
    if (validated && (!s.max_principle_held || !s.energy_monotone)) {
      s.status = RunStatus::kInvariantViolated;
      s.message = why.str();
      break;
    }
    if (s.message.empty() && !why.str().empty()) s.message = why.str();
  }

  s.t_final = s.steps_completed * config.dt;
  if (s.status == RunStatus::kOk && has_exact_solution(problem.kind)) {
    s.error = error_norms(phi, exact_field(problem, spec, s.t_final));
  }
  s.final_field = phi;
  s.wall_seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();

  if (writing) {
    const std::string ext =
        config.snapshot_format == SnapshotFormat::kCsv ? "csv" : "bin";
    write_snapshot((dir / ("final." + ext)).string(), phi,
                   config.snapshot_format);
    write_energy_csv((dir / "energy.csv").string(), s.energy,
                     config.energy_stride);
    if (curvature) write_atomic((dir / "radius.csv").string(), radius_csv(s.radius));
    write_atomic((dir / "summary.json").string(), summary_json(s, config));
  }
  return s;
}

ScalarField sample_onto(const ScalarField& fine, const GridSpec& coarse) {
  const GridSpec& fs_ = fine.spec();
  if (fs_.dim() != coarse.dim() || fs_.bc() != coarse.bc() ||
      std::fabs(fs_.length() - coarse.length()) > 1e-12 * coarse.length() ||
      fs_.origin() != coarse.origin()) {
    throw InvalidArgument("sample_onto: grids cover different domains");
  }
  const int n = fs_.nodes_per_axis();
  const double dxf = fs_.spacing();
  double offset = 0.0;
  switch (fs_.bc()) {
    case Boundary::kNeumann:
      offset = -0.5;
      break;
    case Boundary::kDirichlet:
      offset = 1.0;
      break;
    case Boundary::kPeriodic:
      offset = 0.0;
      break;
  }
  const int d = coarse.dim();
  ScalarField out(coarse);
  for (std::size_t c = 0; c < out.size(); ++c) {
    const Point p = node_coordinates(coarse, coarse.unflatten(c));
    std::array<int, kMaxDim> lo{0, 0, 0};
    std::array<double, kMaxDim> w{0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) {
      const double f = (p[a] - fs_.origin()[a]) / dxf - offset;
      const double r = std::round(f);
      if (std::fabs(f - r) < 1e-9) {
        lo[a] = static_cast<int>(r);
        w[a] = 0.0;
      } else {
        lo[a] = static_cast<int>(std::floor(f));
        w[a] = f - lo[a];
      }
    }
    double value = 0.0;
    for (int corner = 0; corner < (1 << d); ++corner) {
      double weight = 1.0;
      MultiIndex idx{0, 0, 0};
      bool zero = false;
      for (int a = 0; a < d; ++a) {
        const int up = (corner >> a) & 1;
        weight *= up ? w[a] : 1.0 - w[a];
        int i = lo[a] + up;
        if (fs_.bc() == Boundary::kPeriodic) {
          i = ((i % n) + n) % n;
        } else if (fs_.bc() == Boundary::kNeumann) {
          i = std::clamp(i, 0, n - 1);
        } else if (i < 0 || i >= n) {
          zero = true;  // Dirichlet boundary value
        }
        idx[a] = i;
      }
      if (weight == 0.0 || zero) continue;
      value += weight * fine.at(idx);
    }
    out[c] = value;
  }
  return out;
}

namespace {

RunConfig level_config(const RunConfig& base, int subdivisions, double dt) {
  RunConfig c = base;
  c.subdivisions = subdivisions;
  c.dt = dt;
  c.output_dir.clear();
  c.snapshot_times.clear();
  return c;
}

RunSummary run_or_throw(const RunConfig& c) {
  RunSummary s = run(c);
  const std::string where =
      "refinement level N = " + std::to_string(c.subdivisions) + ": ";
  switch (s.status) {
    case RunStatus::kOk:
      return s;
    case RunStatus::kInvariantViolated:
      throw InvariantError(where + s.message);
    case RunStatus::kNumericFailure:
      throw NumericError(where + s.message, 0);
    case RunStatus::kIterationFailure:
      throw IterationError(where + s.message, 0.0);
  }
  return s;
}

void fill_rates(ConvergenceTable& table) {
  std::vector<ErrorReport> main;
  std::vector<ErrorReport> rms;
  for (const auto& r : table.rows) {
    main.push_back({r.dx, r.error.err_inf, r.error.err_l2, {}, {}});
    rms.push_back({r.dx, r.error.err_rms, r.error.err_rms, {}, {}});
  }
  main = convergence_rates(main, Refinement::kAny);
  rms = convergence_rates(rms, Refinement::kAny);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    table.rows[i].cr_inf = main[i].cr_inf;
    table.rows[i].cr_l2 = main[i].cr_l2;
    table.rows[i].cr_rms = rms[i].cr_inf;
  }
}

}  // namespace

ConvergenceTable converge(const RunConfig& base, int levels) {
  return converge(base, levels, base.dt_rule);
}

ConvergenceTable converge(const RunConfig& base, int levels, DtRule rule) {
  if (levels < 2) throw ConfigError("converge needs at least 2 levels");
  validate_run_config(base);
  std::vector<int> ns;
  if (!base.level_subdivisions.empty()) {
    if (static_cast<int>(base.level_subdivisions.size()) < levels) {
      throw ConfigError("level_subdivisions lists fewer than " +
                        std::to_string(levels) + " levels");
    }
    ns.assign(base.level_subdivisions.begin(),
              base.level_subdivisions.begin() + levels);
  } else {
    for (int k = 0; k < levels; ++k) ns.push_back(base.subdivisions << k);
  }
  for (std::size_t k = 1; k < ns.size(); ++k) {
    if (ns[k] <= ns[k - 1]) throw ConfigError("levels must refine the grid");
  }
  const double dx0 = base.dx();
  auto dt_for = [&](int n) {
    if (rule == DtRule::kFixed) return base.dt;
    const double ratio = (default_domain(base.problem.kind).length / n) / dx0;
    return base.dt * ratio * ratio;
  };

  ConvergenceTable table;
  std::optional<ScalarField> reference;
  const bool exact = has_exact_solution(base.problem.kind);
  if (exact) {
    table.reference = "exact";
  } else if (base.reference_subdivisions) {
    table.reference = "reference_run";
    const int nr = *base.reference_subdivisions;
    const double dtr = base.reference_dt ? *base.reference_dt : dt_for(nr);
    reference = run_or_throw(level_config(base, nr, dtr)).final_field;
  } else {
    table.reference = "finest_level";
    const int nr = ns.back();
    reference = run_or_throw(level_config(base, nr, dt_for(nr))).final_field;
    ns.pop_back();
  }

  for (int n : ns) {
    const RunConfig c = level_config(base, n, dt_for(n));
    const RunSummary s = run_or_throw(c);
    ConvergenceRow row;
    row.subdivisions = n;
    row.dx = c.dx();
    row.dt = c.dt;
    row.steps = c.step_count();
    if (exact) {
      row.error = *s.error;
    } else {
      row.error = error_norms(s.final_field, sample_onto(*reference, c.grid()));
    }
    table.rows.push_back(row);
  }
  fill_rates(table);
  if (!base.output_dir.empty()) {
    write_convergence_csv(
        (fs::path(base.output_dir) / "convergence.csv").string(), table);
  }
  return table;
}

std::vector<RunSummary> compare(const std::vector<RunConfig>& configs,
                                const std::string& output_dir) {
  if (configs.empty()) throw ConfigError("compare needs at least one config");
  for (const auto& c : configs) {
    validate_run_config(c);
    if (c.problem.kind != configs[0].problem.kind ||
        c.subdivisions != configs[0].subdivisions) {
      throw ConfigError("compared configs must share problem and grid");
    }
  }
  std::vector<RunSummary> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    RunConfig c = configs[i];
    c.output_dir = output_dir.empty()
                       ? std::string()
                       : (fs::path(output_dir) /
                          (std::to_string(i) + "_" + c.label))
                             .string();
    rows.push_back(run(c));
  }
  if (!output_dir.empty()) {
    write_compare_csv((fs::path(output_dir) / "compare.csv").string(), rows);
  }
  return rows;
}

void write_energy_csv(const std::string& path,
                      const std::vector<EnergyRecord>& records, int stride) {
  if (stride < 1) throw InvalidArgument("energy stride must be >= 1");
  std::string s = "step,t,energy,max_abs\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i % stride != 0 && i + 1 != records.size()) continue;
    const auto& r = records[i];
    s += std::to_string(i) + "," + fmt(r.t) + "," + fmt(r.energy) + "," +
         fmt(r.max_abs) + "\n";
  }
  write_atomic(path, s);
}

void write_snapshot_csv(const std::string& path, const ScalarField& field) {
  const GridSpec& spec = field.spec();
  const int d = spec.dim();
  static const char* const kIdx[] = {"i", "j", "k"};
  static const char* const kPos[] = {"x", "y", "z"};
  std::string s;
  for (int a = 0; a < d; ++a) s += std::string(kIdx[a]) + ",";
  for (int a = 0; a < d; ++a) s += std::string(kPos[a]) + ",";
  s += "phi\n";
  for (std::size_t f = 0; f < field.size(); ++f) {
    const MultiIndex node = spec.unflatten(f);
    const Point p = node_coordinates(spec, node);
    for (int a = 0; a < d; ++a) s += std::to_string(node[a]) + ",";
    for (int a = 0; a < d; ++a) s += fmt(p[a]) + ",";
    s += fmt(field[f]) + "\n";
  }
  write_atomic(path, s);
}

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) s.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_snapshot_binary(const std::string& path, const ScalarField& field) {
  const GridSpec& spec = field.spec();
  std::string s = "ACEF";
  put_u32(s, static_cast<std::uint32_t>(spec.dim()));
  put_u32(s, static_cast<std::uint32_t>(spec.nodes_per_axis()));
  put_u32(s, 0);
  s.reserve(16 + 8 * field.size());
  for (double v : field.values()) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      s.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
  }
  write_atomic(path, s);
}

ScalarField read_snapshot_binary(const std::string& path,
                                 const GridSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(data.data());
  if (data.size() < 16 || std::memcmp(p, "ACEF", 4) != 0) {
    throw IoError(path + " is not an ACEF snapshot");
  }
  if (get_u32(p + 4) != static_cast<std::uint32_t>(spec.dim()) ||
      get_u32(p + 8) != static_cast<std::uint32_t>(spec.nodes_per_axis())) {
    throw IoError(path + " does not match the expected grid");
  }
  if (data.size() != 16 + 8 * spec.node_count()) {
    throw IoError(path + " has the wrong length");
  }
  std::vector<double> values(spec.node_count());
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(p[16 + 8 * i + b]) << (8 * b);
    }
    std::memcpy(&values[i], &bits, sizeof bits);
  }
  return ScalarField(spec, std::move(values));
}

void write_convergence_csv(const std::string& path,
                           const ConvergenceTable& table) {
  std::string s =
      "subdivisions,dx,dt,steps,err_inf,err_l2,err_rms,cr_inf,cr_l2,cr_rms\n";
  for (const auto& r : table.rows) {
    s += std::to_string(r.subdivisions) + "," + fmt(r.dx) + "," + fmt(r.dt) +
         "," + std::to_string(r.steps) + "," + fmt(r.error.err_inf) + "," +
         fmt(r.error.err_l2) + "," + fmt(r.error.err_rms) + "," +
         fmt_opt(r.cr_inf) + "," + fmt_opt(r.cr_l2) + "," + fmt_opt(r.cr_rms) +
         "\n";
  }
  write_atomic(path, s);
}

void write_compare_csv(const std::string& path,
                       const std::vector<RunSummary>& rows) {
  std::string s =
      "label,scheme,status,steps_requested,steps_completed,max_abs_peak,"
      "max_principle,energy_monotone,final_energy,err_inf,err_l2,err_rms\n";
  for (const auto& r : rows) {
    const double e = r.energy.empty() ? 0.0 : r.energy.back().energy;
    s += r.label + "," + to_string(r.scheme) + "," + to_string(r.status) + "," +
         std::to_string(r.steps_requested) + "," +
         std::to_string(r.steps_completed) + "," + fmt(r.max_abs_peak) + "," +
         (r.max_principle_held ? "pass" : "fail") + "," +
         (r.energy_monotone ? "pass" : "fail") + "," + fmt(e) + ",";
    if (r.error) {
      s += fmt(r.error->err_inf) + "," + fmt(r.error->err_l2) + "," +
           fmt(r.error->err_rms);
    } else {
      s += ",,";
    }
    s += "\n";
  }
  write_atomic(path, s);
}

std::string summary_json(const RunSummary& s, const RunConfig& c) {
  using nlohmann::json;
  auto opt = [](const auto& v) -> json {
    if (v) return json(*v);
    return json(nullptr);
  };
  auto num = [](double v) -> json {
    if (std::isfinite(v)) return json(v);
    return json(fmt(v));
  };
  json j;
  j["label"] = s.label;
  j["status"] = to_string(s.status);
  j["message"] = s.message;
  j["config"] = {
      {"problem", to_string(c.problem.kind)},
      {"scheme", to_string(c.scheme)},
      {"subdivisions", c.subdivisions},
      {"dx", c.dx()},
      {"dt", c.dt},
      {"t_end", c.t_end},
      {"eps_interface", c.problem.eps_interface},
      {"eps_ratio", opt(c.eps_ratio)},
      {"omega1", c.omega1},
      {"seed", c.problem.seed},
      {"allow_unsafe", c.allow_unsafe},
  };
  j["steps_requested"] = s.steps_requested;
  j["steps_completed"] = s.steps_completed;
  j["t_final"] = s.t_final;
  j["max_abs_peak"] = num(s.max_abs_peak);
  j["max_principle"] = s.max_principle_held ? "pass" : "fail";
  j["energy_monotone"] = s.energy_monotone ? "pass" : "fail";
  j["first_energy_increase"] = opt(s.first_energy_increase);
  j["worst_energy_increase"] = num(s.worst_energy_increase);
  if (!s.energy.empty()) {
    j["energy_initial"] = num(s.energy.front().energy);
    j["energy_final"] = num(s.energy.back().energy);
  }
  j["newton_fallbacks"] = s.newton_fallbacks;
  if (s.error) {
    j["error"] = {{"err_inf", s.error->err_inf},
                  {"err_l2", s.error->err_l2},
                  {"err_rms", s.error->err_rms}};
  } else {
    j["error"] = nullptr;
  }
  if (!s.radius.empty()) {
    j["radius_final"] = opt(s.radius.back().radius);
    j["radius_expected"] = opt(s.radius.back().expected);
  }
  j["wall_seconds"] = s.wall_seconds;
  return j.dump(2) + "\n";
}

}  // namespace acefd
