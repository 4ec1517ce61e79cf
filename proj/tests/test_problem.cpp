#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "sdwave/error.hpp"
#include "sdwave/problem.hpp"

using namespace sdwave;

namespace {

ProblemSpec parse(const std::string &text) {
  std::istringstream in(text);
  return parse_problem(in);
}

}  // namespace

TEST_CASE("bump profile") {
  BumpProfile b{2.0, 3};
  CHECK(b(0.0, 1.0) == 2.0);
  CHECK(b(0.5, 1.0) == doctest::Approx(2.0 * 0.75 * 0.75 * 0.75));
  CHECK(b(1.0, 1.0) == 0.0);
  CHECK(b(3.0, 2.0) == 0.0);
}

TEST_CASE("config parsing") {
  const auto s = parse("# reference case\nn = 3\nmu = 2\np = 1.5   # power\n\nR=1\ng_amplitude = 0.5\ndr = 0.0078125\n");
  CHECK(s.n == 3);
  CHECK(s.mu == 2.0);
  CHECK(s.p == 1.5);
  CHECK(s.g.amplitude == 0.5);
  CHECK(s.grid.dr == 0.0078125);
  CHECK(s.blowup_threshold == 1e6);

  CHECK_THROWS_AS(parse("n = 3\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("n = 3\nn = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse("n 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("mu = two\n"), ConfigError);
  CHECK_THROWS_AS(parse("n = 2.5\n"), ConfigError);
}

TEST_CASE("validation enforces the theorem hypotheses") {
  CHECK_THROWS_AS(parse("n = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("mu = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("p = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("p = 1.79\n"), ConfigError);  // p_S(5) ~ 1.7808
  CHECK_THROWS_AS(parse("R = 0.9\n"), ConfigError);
  CHECK_THROWS_AS(parse("f_amplitude = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("g_k = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("cfl = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("output_stride = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("blowup_threshold = 100\n"), ConfigError);
  CHECK_NOTHROW(parse("f_amplitude = 0\ng_amplitude = 0\n"));
  CHECK_THROWS_AS(load_problem("/nonexistent/problem.cfg"), ConfigError);
}

TEST_CASE("echo round trip") {
  auto s = parse("n = 4\nmu = 0.75\np = 1.4\nR = 2\nf_amplitude = 0.25\nf_k = 4\ncfl = 0.5\nt_max = 33.5\n");
  const auto back = parse(echo_problem(s));
  CHECK(echo_problem(back) == echo_problem(s));
  CHECK(back.p == s.p);
  CHECK(back.f.k == 4);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e6) == "1e+06");
}
