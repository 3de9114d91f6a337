#include "bykov/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace bykov::cli {

const std::vector<KeySpec>& known_keys() {
  static const std::vector<KeySpec> keys = {
      {"C1", "1.1", "contraction rate at O1"},
      {"E1", "0.9", "expansion rate at O1"},
      {"omega1", "1", "spin at O1"},
      {"C2", "1.1", "contraction rate at O2"},
      {"E2", "0.9", "expansion rate at O2"},
      {"omega2", "1", "spin at O2"},
      {"A", "0.01", "1-D splitting amplitude"},
      {"lambda", "0.002", "2-D splitting amplitude"},
      {"a", "", "if set, lambda = a*A"},
      {"delta", "", "with K_omega: replace eigenvalue data by a symmetric realization"},
      {"K_omega", "", "with delta: see above"},
      {"seed", "1", "PRNG seed"},
      {"workers", "0", "worker threads (0: hardware, capped by BYKOV_THREADS)"},
      {"classify.c", "0.25", "two-turns constant c"},
      {"classify.checkers", "false", "run annulus and hyperbolicity checkers"},
      {"classify.grid", "64", "checker grid per axis"},
      {"sweep.axis", "A", "column parameter: A or K_omega"},
      {"sweep.x_min", "0.005", "first column value"},
      {"sweep.x_max", "0.02", "last column value"},
      {"sweep.x_n", "20", "columns"},
      {"sweep.a_min", "0.1", "first row a"},
      {"sweep.a_max", "0.55", "last row a"},
      {"sweep.a_n", "40", "rows"},
      {"sweep.orbits", "4", "random orbits per cell"},
      {"sweep.iterations", "10000", "recorded iterates per orbit"},
      {"sweep.transient", "2000", "discarded iterates per orbit"},
      {"circle.N", "1024", "nodes (power of two)"},
      {"circle.tol", "1e-12", "graph transform stopping tolerance"},
      {"circle.max_iter", "500", "graph transform iteration cap"},
      {"circle.rotation_n", "1000000", "iterates for the rotation number"},
      {"lyapunov.x0", "0", "initial angle"},
      {"lyapunov.y0", "", "initial height (default: middle of the annulus band)"},
      {"lyapunov.n", "100000", "recorded iterates"},
      {"lyapunov.transient", "1000", "discarded iterates"},
      {"tongue.period", "1", "period k"},
      {"tongue.winding", "1", "winding number of the locked orbit"},
      {"tongue.A_min", "0.005", "first A column"},
      {"tongue.A_max", "0.02", "last A column"},
      {"tongue.A_n", "16", "A columns"},
      {"tongue.a_min", "0", "lower end of the a search"},
      {"tongue.a_max", "0.5", "upper end of the a search"},
      {"tongue.a_n", "26", "coarse a samples before bisection"},
      {"tongue.tol", "1e-10", "bisection tolerance in a"},
      {"manifolds.period", "1", "period of the anchor saddle"},
      {"manifolds.winding", "", "winding of the anchor saddle (default: any)"},
      {"manifolds.arclength", "50", "arclength cap per branch (x, y/A^delta metric)"},
      {"manifolds.spacing", "0.002", "point spacing"},
      {"manifolds.local_arclength", "0.05", "local pieces of both manifolds (this arclength) are not compared"},
      {"manifolds.tol_tangent", "0.0001", "tangency distance threshold"},
      {"manifolds.y_max_factor", "4", "growth stops above this multiple of the band top"},
      {"hopf.mu1", "0", "unfolding parameter mu1"},
      {"hopf.mu2", "1", "unfolding parameter mu2"},
      {"hopf.a", "1", "normal-form coefficient a_h"},
      {"hopf.c", "0", "third-order coefficient c"},
      {"hopf.d", "0", "third-order coefficient d"},
      {"hopf.e", "0", "third-order coefficient e"},
      {"hopf.f", "0", "third-order coefficient f"},
      {"hopf.omega", "1", "angular speed of the lift"},
      {"hopf.order", "2", "normal form order (2 or 3)"},
      {"hopf.h", "0.001", "step size"},
      {"hopf.t_end", "10", "trajectory length"},
      {"hopf.r0", "0.5", "initial r"},
      {"hopf.z0", "0", "initial z"},
      {"hopf.section_z", "0", "section height"},
      {"hopf.direction", "down", "section crossing direction: down or up"},
      {"hopf.hits", "0", "section crossings to record (0: none)"},
      {"hopf.t_max", "10000", "time cap for the section run"},
  };
  return keys;
}

std::string keys_help() {
  std::ostringstream os;
  os << "Configuration keys (file lines key=value, or --key=value):\n";
  for (const auto& k : known_keys()) {
    os << "  " << k.key << " = " << (k.default_value.empty() ? "<unset>" : k.default_value)
       << "    " << k.help << "\n";
  }
  return os.str();
}

RunConfig::RunConfig() {
  for (const auto& k : known_keys()) values_[k.key] = k.default_value;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (values_.find(key) == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  values_[key] = trim(value);
  explicit_.insert(key);
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    try {
      set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  load_text(ss.str(), path);
}

bool RunConfig::has(const std::string& key) const { return !text(key).empty(); }

std::string RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second;
}

double RunConfig::real(const std::string& key) const {
  const std::string v = text(key);
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a real number, got '" + v + "'");
  }
}

long RunConfig::integer(const std::string& key) const {
  const std::string v = text(key);
  try {
    std::size_t pos = 0;
    const long n = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return n;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  const std::string v = text(key);
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long n = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return n;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
}

bool RunConfig::flag(const std::string& key) const {
  std::string v = text(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

ModelParams RunConfig::model() const {
  ModelParams p;
  if (has("delta") != has("K_omega"))
    throw ConfigError("delta and K_omega must be given together");
  const double A = real("A");
  const double lambda = has("a") ? real("a") * A : real("lambda");
  if (has("delta")) return ModelParams::realizing(real("delta"), real("K_omega"), A, lambda);
  p.C1 = real("C1");
  p.E1 = real("E1");
  p.omega1 = real("omega1");
  p.C2 = real("C2");
  p.E2 = real("E2");
  p.omega2 = real("omega2");
  p.A = A;
  p.lambda = lambda;
  return p;
}

}  // namespace bykov::cli
