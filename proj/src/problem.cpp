#include "sdwave/problem.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "sdwave/error.hpp"
#include "sdwave/exponents.hpp"

namespace sdwave {

double BumpProfile::operator()(double r, double R) const {
  const double s = 1.0 - (r * r) / (R * R);
  if (s <= 0.0) return 0.0;
  return amplitude * std::pow(s, k);
}

void ProblemSpec::validate() const {
  auto fail = [](const std::string &m) { throw ConfigError(m); };
  if (n < 2) fail("n must be >= 2");
  if (!(mu > 0.0)) fail("mu must be positive");
  if (!(p > 1.0)) fail("p must exceed 1");
  const double ps = strauss_exponent(n + mu);
  if (!(p < ps)) fail("p must lie below p_S(n+mu) = " + format_double(ps));
  if (!(R >= 1.0)) fail("R must be >= 1");
  if (!(f.amplitude >= 0.0) || !(g.amplitude >= 0.0)) fail("data amplitudes must be nonnegative");
  if (f.k < 3 || g.k < 3) fail("bump smoothness k must be >= 3");
  if (!(grid.dr > 0.0)) fail("dr must be positive");
  if (!(grid.cfl > 0.0 && grid.cfl < 1.0)) fail("cfl must lie in (0, 1)");
  if (!(grid.t_max > 0.0)) fail("t_max must be positive");
  if (grid.output_stride < 1) fail("output_stride must be >= 1");
  if (!(blowup_threshold >= 1e3)) fail("blowup_threshold must be >= 1e3");
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string &key, const std::string &v) {
  double x = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  return x;
}

int to_int(const std::string &key, const std::string &v) {
  int x = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  return x;
}

}  // namespace

ProblemSpec parse_problem(std::istream &in) {
  ProblemSpec s;
  std::map<std::string, std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (seen.count(key)) throw ConfigError("duplicate key '" + key + "'");
    seen[key] = val;

    if (key == "n") s.n = to_int(key, val);
    else if (key == "mu") s.mu = to_double(key, val);
    else if (key == "p") s.p = to_double(key, val);
    else if (key == "R") s.R = to_double(key, val);
    else if (key == "f_amplitude") s.f.amplitude = to_double(key, val);
    else if (key == "f_k") s.f.k = to_int(key, val);
    else if (key == "g_amplitude") s.g.amplitude = to_double(key, val);
    else if (key == "g_k") s.g.k = to_int(key, val);
    else if (key == "dr") s.grid.dr = to_double(key, val);
    else if (key == "cfl") s.grid.cfl = to_double(key, val);
    else if (key == "t_max") s.grid.t_max = to_double(key, val);
    else if (key == "output_stride") s.grid.output_stride = to_int(key, val);
    else if (key == "blowup_threshold") s.blowup_threshold = to_double(key, val);
    else throw ConfigError("unknown key '" + key + "'");
  }
  s.validate();
  return s;
}

ProblemSpec load_problem(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_problem(in);
}

std::string echo_problem(const ProblemSpec &s) {
  std::ostringstream os;
  os << "n = " << s.n << '\n'
     << "mu = " << format_double(s.mu) << '\n'
     << "p = " << format_double(s.p) << '\n'
     << "R = " << format_double(s.R) << '\n'
     << "f_amplitude = " << format_double(s.f.amplitude) << '\n'
     << "f_k = " << s.f.k << '\n'
     << "g_amplitude = " << format_double(s.g.amplitude) << '\n'
     << "g_k = " << s.g.k << '\n'
     << "dr = " << format_double(s.grid.dr) << '\n'
     << "cfl = " << format_double(s.grid.cfl) << '\n'
     << "t_max = " << format_double(s.grid.t_max) << '\n'
     << "output_stride = " << s.grid.output_stride << '\n'
     << "blowup_threshold = " << format_double(s.blowup_threshold) << '\n';
  return os.str();
}

}  // namespace sdwave
