#include "acefd/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "acefd/error.hpp"

namespace acefd {

const char* to_string(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::kRlbMieFd:
      return "rlb_mie_fd";
    case SchemeKind::kFexFd:
      return "fex_fd";
    case SchemeKind::kCrankNicolson:
      return "cn";
    case SchemeKind::kKinetic:
      return "kinetic";
  }
  return "unknown";
}

const char* to_string(DtRule rule) noexcept {
  return rule == DtRule::kFixed ? "fixed" : "fixed_ratio_dx2";
}

SchemeKind parse_scheme(const std::string& text) {
  for (auto k : {SchemeKind::kRlbMieFd, SchemeKind::kFexFd,
                 SchemeKind::kCrankNicolson, SchemeKind::kKinetic}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown scheme '" + text + "'");
}

DtRule parse_dt_rule(const std::string& text) {
  if (text == "fixed") return DtRule::kFixed;
  if (text == "fixed_ratio_dx2") return DtRule::kFixedRatioDx2;
  throw ConfigError("unknown dt_rule '" + text + "'");
}

double default_omega1(int dim) {
  switch (dim) {
    case 1:
      return 1.0 / 3.0;
    case 2:
      return 1.0 / 5.0;
    case 3:
      return 1.0 / 6.0;
  }
  throw InvalidArgument("dimension must be 1..3");
}

namespace {

const char* const kKnownKeys[] = {
    "problem",       "scheme",         "label",
    "subdivisions",  "dx",             "dt",
    "t_end",         "eps_interface",  "eps_ratio",
    "omega1",        "radius0",        "amplitude",
    "seed",          "snapshot_times", "snapshot_format",
    "output_dir",    "allow_unsafe",   "energy_stride",
    "dt_rule",       "level_subdivisions",
    "reference_subdivisions",          "reference_dt",
    "newton_tol",    "newton_max_iterations",
};

bool known_key(const std::string& key) {
  if (key.rfind("var_", 0) == 0 && key.size() > 4) return true;
  return std::find(std::begin(kKnownKeys), std::end(kKnownKeys), key) !=
         std::end(kKnownKeys);
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
  if (key.empty() || !(std::islower(static_cast<unsigned char>(key[0])))) {
    return false;
  }
  return std::all_of(key.begin(), key.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) ||
           std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

// Recursive-descent evaluator:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr ')' | '(' expr ')'
class ExpressionParser {
 public:
  using Lookup = std::function<double(const std::string&)>;

  ExpressionParser(const std::string& text, Lookup lookup)
      : text_(text), lookup_(std::move(lookup)) {}

  double parse() {
    const double v = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + text_.substr(pos_) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("bad expression '" + text_ + "': " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        v /= unary();
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  double power() {
    const double base = primary();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    if (accept('(')) {
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = text_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name = text_.substr(start, pos_ - start);
      if (accept('(')) {
        const double arg = expr();
        if (!accept(')')) fail("missing ')' after " + name + "(");
        return call(name, arg);
      }
      if (name == "pi") return std::numbers::pi;
      return lookup_(name);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  double call(const std::string& name, double x) const {
    if (name == "sqrt") return std::sqrt(x);
    if (name == "cbrt") return std::cbrt(x);
    if (name == "tanh") return std::tanh(x);
    if (name == "exp") return std::exp(x);
    if (name == "log") return std::log(x);
    if (name == "sin") return std::sin(x);
    if (name == "cos") return std::cos(x);
    if (name == "abs") return std::fabs(x);
    fail("unknown function '" + name + "'");
  }

  std::string text_;
  Lookup lookup_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto where = [&]() {
    return (origin.empty() ? std::string("line ") : origin + ":") +
           std::to_string(lineno);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where() + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where() + ": bad key '" + key + "'");
    if (!known_key(key)) {
      throw ConfigError(where() + ": unknown key '" + key + "'");
    }
    if (value.empty()) throw ConfigError(where() + ": empty value for " + key);
    if (cfg.entries_.count(key)) {
      throw ConfigError(where() + ": duplicate key '" + key + "'");
    }
    cfg.entries_[key] = Entry{value, lineno};
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key) || !known_key(key)) {
    throw ConfigError("unknown key '" + key + "'");
  }
  const std::string v = trim(value);
  if (v.empty()) throw ConfigError("empty value for " + key);
  entries_[key] = Entry{v, 0};
}

bool Config::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

const std::string& Config::raw(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second.value;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

double Config::eval_in(const std::string& text,
                       std::vector<std::string>& stack) const {
  ExpressionParser parser(
      text, [&](const std::string& name) { return lookup(name, stack); });
  return parser.parse();
}

double Config::lookup(const std::string& name,
                      std::vector<std::string>& stack) const {
  if (std::find(stack.begin(), stack.end(), name) != stack.end()) {
    std::string chain;
    for (const auto& s : stack) chain += s + " -> ";
    throw ConfigError("circular reference: " + chain + name);
  }
  stack.push_back(name);
  double v;
  auto it = entries_.find(name);
  const bool textual = name == "problem" || name == "scheme" ||
                       name == "label" || name == "output_dir" ||
                       name == "snapshot_format" || name == "dt_rule" ||
                       name == "snapshot_times" ||
                       name == "level_subdivisions" || name == "allow_unsafe";
  if (textual) throw ConfigError("'" + name + "' is not a numeric key");
  if (it != entries_.end()) {
    v = eval_in(it->second.value, stack);
  } else if (name == "dim" || name == "length" || name == "lower") {
    const Domain d = default_domain(parse_problem(raw("problem")));
    v = name == "dim" ? d.dim : (name == "length" ? d.length : d.lower);
  } else if (name == "dx") {
    if (!has("subdivisions")) throw ConfigError("need subdivisions or dx");
    v = lookup("length", stack) / lookup("subdivisions", stack);
  } else if (name == "subdivisions") {
    if (!has("dx")) throw ConfigError("need subdivisions or dx");
    v = std::round(lookup("length", stack) / lookup("dx", stack));
  } else if (name == "eps_interface") {
    if (!has("eps_ratio")) throw ConfigError("need eps_interface or eps_ratio");
    const double dx = lookup("dx", stack);
    v = std::sqrt(lookup("eps_ratio", stack) * dx * dx / lookup("dt", stack));
  } else if (name == "eps_ratio") {
    if (!has("eps_interface")) {
      throw ConfigError("need eps_interface or eps_ratio");
    }
    const double e = lookup("eps_interface", stack);
    const double dx = lookup("dx", stack);
    v = e * e * lookup("dt", stack) / (dx * dx);
  } else if (name == "omega1") {
    v = default_omega1(static_cast<int>(lookup("dim", stack)));
  } else {
    throw ConfigError("unknown name '" + name + "'");
  }
  if (!std::isfinite(v)) {
    throw ConfigError("'" + name + "' evaluates to a non-finite value");
  }
  stack.pop_back();
  return v;
}

double Config::number(const std::string& key) const {
  std::vector<std::string> stack;
  return lookup(key, stack);
}

double Config::evaluate(const std::string& expression) const {
  std::vector<std::string> stack;
  const double v = eval_in(expression, stack);
  if (!std::isfinite(v)) {
    throw ConfigError("'" + expression + "' evaluates to a non-finite value");
  }
  return v;
}

std::vector<double> Config::number_list(const std::string& key) const {
  std::vector<double> out;
  if (!has(key)) return out;
  for (const auto& item : split_list(raw(key))) out.push_back(evaluate(item));
  return out;
}

bool Config::flag(const std::string& key) const {
  if (!has(key)) return false;
  std::string v = raw(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("'" + key + "' must be a boolean, got '" + raw(key) + "'");
}

namespace {

int as_int(double v, const std::string& key) {
  if (std::fabs(v - std::round(v)) > 1e-9 * std::fmax(1.0, std::fabs(v)) ||
      std::fabs(v) > 1e9) {
    throw ConfigError("'" + key + "' must be an integer");
  }
  return static_cast<int>(std::lround(v));
}

std::uint64_t parse_seed(const std::string& text) {
  if (text.empty() ||
      !std::all_of(text.begin(), text.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    throw ConfigError("seed must be a non-negative integer");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ConfigError("seed out of range");
  }
}

}  // namespace

RunConfig make_run_config(const Config& cfg) {
  RunConfig rc;
  if (!cfg.has("problem")) throw ConfigError("missing key 'problem'");
  try {
    rc.problem.kind = parse_problem(cfg.raw("problem"));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  const Domain domain = default_domain(rc.problem.kind);
  if (cfg.has("scheme")) rc.scheme = parse_scheme(cfg.raw("scheme"));
  rc.label = cfg.has("label") ? cfg.raw("label") : to_string(rc.scheme);

  if (cfg.has("subdivisions") == cfg.has("dx")) {
    throw ConfigError("give exactly one of 'subdivisions' and 'dx'");
  }
  if (cfg.has("subdivisions")) {
    rc.subdivisions = as_int(cfg.number("subdivisions"), "subdivisions");
  } else {
    const double n = domain.length / cfg.number("dx");
    if (std::fabs(n - std::round(n)) > 1e-9 * n) {
      throw ConfigError("dx does not divide the domain length");
    }
    rc.subdivisions = static_cast<int>(std::lround(n));
  }
  if (rc.subdivisions < 1) throw ConfigError("subdivisions must be positive");

  for (const char* key : {"dt", "t_end"}) {
    if (!cfg.has(key)) throw ConfigError(std::string("missing key '") + key + "'");
  }
  rc.dt = cfg.number("dt");
  rc.t_end = cfg.number("t_end");
  if (!(rc.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(rc.t_end > 0.0)) throw ConfigError("t_end must be positive");

  if (cfg.has("eps_interface") == cfg.has("eps_ratio")) {
    throw ConfigError("give exactly one of 'eps_interface' and 'eps_ratio'");
  }
  if (cfg.has("eps_ratio")) {
    rc.eps_ratio = cfg.number("eps_ratio");
    if (!(*rc.eps_ratio > 0.0)) throw ConfigError("eps_ratio must be positive");
  }
  rc.problem.eps_interface = cfg.number("eps_interface");
  if (!(rc.problem.eps_interface > 0.0)) {
    throw ConfigError("eps_interface must be positive");
  }
  rc.omega1 = cfg.number("omega1");
  if (cfg.has("radius0")) rc.problem.radius0 = cfg.number("radius0");
  if (cfg.has("amplitude")) rc.problem.amplitude = cfg.number("amplitude");
  if (cfg.has("seed")) rc.problem.seed = parse_seed(cfg.raw("seed"));

  rc.snapshot_times = cfg.number_list("snapshot_times");
  if (cfg.has("snapshot_format")) {
    const std::string& f = cfg.raw("snapshot_format");
    if (f == "csv") {
      rc.snapshot_format = SnapshotFormat::kCsv;
    } else if (f == "binary") {
      rc.snapshot_format = SnapshotFormat::kBinary;
    } else {
      throw ConfigError("snapshot_format must be csv or binary");
    }
  }
  if (cfg.has("output_dir")) rc.output_dir = cfg.raw("output_dir");
  rc.allow_unsafe = cfg.flag("allow_unsafe");
  if (cfg.has("energy_stride")) {
    rc.energy_stride = as_int(cfg.number("energy_stride"), "energy_stride");
  }
  if (cfg.has("dt_rule")) rc.dt_rule = parse_dt_rule(cfg.raw("dt_rule"));
  for (double v : cfg.number_list("level_subdivisions")) {
    rc.level_subdivisions.push_back(as_int(v, "level_subdivisions"));
  }
  if (cfg.has("reference_subdivisions")) {
    rc.reference_subdivisions =
        as_int(cfg.number("reference_subdivisions"), "reference_subdivisions");
  }
  if (cfg.has("reference_dt")) rc.reference_dt = cfg.number("reference_dt");
  if (cfg.has("newton_tol")) rc.newton.tolerance = cfg.number("newton_tol");
  if (cfg.has("newton_max_iterations")) {
    rc.newton.max_iterations =
        as_int(cfg.number("newton_max_iterations"), "newton_max_iterations");
  }
  validate_run_config(rc);
  return rc;
}

GridSpec RunConfig::grid() const {
  return problem_grid(problem.kind, subdivisions);
}

double RunConfig::dx() const {
  return default_domain(problem.kind).length / subdivisions;
}

long RunConfig::step_count() const { return std::lround(t_end / dt); }

SchemeParams RunConfig::params() const {
  const int dim = default_domain(problem.kind).dim;
  const bool macro =
      scheme == SchemeKind::kRlbMieFd || scheme == SchemeKind::kKinetic;
  const Safety safety =
      macro && !allow_unsafe ? Safety::kValidated : Safety::kUnsafe;
  if (macro) {
    return eps_ratio ? params_from_ratio(dim, omega1, *eps_ratio, dx(), dt, safety)
                     : derive_params(dim, omega1, problem.eps_interface, dx(),
                                     dt, safety);
  }
  // The explicit and CN schemes have no cubic, so dt >= 2 is allowed here.
  SchemeParams p;
  p.dim = dim;
  p.omega1 = omega1;
  p.dx = dx();
  p.dt = dt;
  p.eps_ratio = eps_ratio ? *eps_ratio
                          : problem.eps_interface * problem.eps_interface *
                                dt / (p.dx * p.dx);
  p.eps_interface = std::sqrt(p.eps_ratio * p.dx * p.dx / dt);
  p.relaxation = omega1 / p.eps_ratio;
  p.lattice_speed = p.dx / dt;
  p.safety = Safety::kUnsafe;
  return p;
}

void validate_run_config(const RunConfig& rc) {
  if (rc.subdivisions < 1) throw ConfigError("subdivisions must be positive");
  if (!(rc.dt > 0.0) || !(rc.t_end > 0.0)) {
    throw ConfigError("dt and t_end must be positive");
  }
  if (rc.step_count() < 1) throw ConfigError("t_end is shorter than dt/2");
  if (rc.energy_stride < 1) throw ConfigError("energy_stride must be >= 1");
  try {
    (void)rc.grid();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  for (double t : rc.snapshot_times) {
    if (!(t >= 0.0) || t > rc.t_end * (1.0 + 1e-12)) {
      throw ConfigError("snapshot time outside [0, t_end]");
    }
    const double k = t / rc.dt;
    if (std::fabs(k - std::round(k)) > 1e-9 * std::fmax(1.0, k)) {
      throw ConfigError("snapshot time is not a multiple of dt");
    }
  }
  for (int n : rc.level_subdivisions) {
    if (n < 1) throw ConfigError("level_subdivisions must be positive");
  }
  if (rc.reference_subdivisions && *rc.reference_subdivisions < 1) {
    throw ConfigError("reference_subdivisions must be positive");
  }
  if (rc.reference_dt && !(*rc.reference_dt > 0.0)) {
    throw ConfigError("reference_dt must be positive");
  }
  if (!(rc.newton.tolerance > 0.0) || rc.newton.max_iterations < 1) {
    throw ConfigError("newton_tol and newton_max_iterations must be positive");
  }
  // Throws ValidationError in validated mode for the macroscopic schemes.
  const SchemeParams p = rc.params();
  if (rc.scheme == SchemeKind::kFexFd && !rc.allow_unsafe &&
      !baselines::fex_fd_condition(p)) {
    std::ostringstream msg;
    msg << "explicit scheme condition dt <= (1 - 2 d eps)/2 with 0 < eps <= "
           "1/(2d) violated (dt = "
        << p.dt << ", eps = " << p.eps_ratio << ")";
    throw ValidationError(msg.str());
  }
}

}  // namespace acefd
