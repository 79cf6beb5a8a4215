#include <doctest.h>

#include <cmath>
#include <sstream>

#include "geoscatter/catalog.hpp"
#include "geoscatter/config.hpp"
#include "geoscatter/dataset_io.hpp"
#include "geoscatter/error.hpp"
#include "geoscatter/expression.hpp"

using namespace geoscatter;

namespace {

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_dataset(in);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  return "";
}

const char* kHead =
    "#geoscatter-dataset v1\n"
    "#metric flat  dim 2  grid 64  boundary_len 6.2831853071795862\n";

}  // namespace

TEST_CASE("expressions") {
  const Expression e = Expression::parse("2*x1^2 - sin(x2) + exp(0)/4 + pi", 2);
  const Vec x = vec2(0.5, 0.3);
  CHECK(e.eval(x) == doctest::Approx(0.5 - std::sin(0.3) + 0.25 + kPi).epsilon(1e-15));
  const Jet j = e.eval_jet(x);
  CHECK(j.d[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(j.d[1] == doctest::Approx(-std::cos(0.3)).epsilon(1e-15));
  CHECK(Expression::parse("-x1^2", 2).eval(vec2(3, 0)) == doctest::Approx(-9.0));
  CHECK(Expression::parse("2^3^2", 2).eval(x) == doctest::Approx(512.0));

  for (const char* bad : {"x1 +", "sin(x1", "x3", "foo(x1)", "1..2"}) {
    CAPTURE(bad);
    try {
      Expression::parse(bad, 2);
      FAIL("parsed");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::Parse);
    }
  }
}

TEST_CASE("config files") {
  std::istringstream in("# comment\nmetric = conformal\nphi_expr = 0.3 + 0.1*x1  # trailing\nsource = 0.1 0.2\n"
                        "source = 0.3 0.4\nboundary = circle(1)\n");
  const KeyValueConfig cfg = KeyValueConfig::parse(in);
  CHECK(cfg.get("metric") == "conformal");
  CHECK(cfg.get_all("source").size() == 2);
  CHECK(cfg.line_of("boundary") == 6);
  const Manifold m = build_manifold(cfg);
  CHECK(m.metric->eval(vec2(1, 0))(0, 0) == doctest::Approx(std::exp(0.8)));

  std::istringstream bad("metric = warped\n");
  try {
    build_manifold(KeyValueConfig::parse(bad));
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Usage);
  }

  const auto [lo, hi] = parse_bbox("[-1.5..1.5, -2..2]", 2);
  CHECK(lo[1] == -2.0);
  CHECK(hi[0] == 1.5);
  CHECK(parse_bbox("-1 1 -3 3", 2).second[1] == 3.0);
  CHECK_THROWS_AS(parse_bbox("[1..-1, 0..1]", 2), Error);
}

TEST_CASE("dataset round trip is bit exact") {
  const Manifold m = catalog::conformal_disk();
  const Dataset d = generate_dataset(m, {{"a", vec2(0.1, 0.2)}, {"b", vec2(-0.3, 0.1)}}, 64);
  std::ostringstream o1;
  write_dataset(o1, d);
  std::istringstream in(o1.str());
  const Dataset back = read_dataset(in);
  std::ostringstream o2;
  write_dataset(o2, back);
  CHECK(o1.str() == o2.str());
  REQUIRE(back.sets.size() == 2);
  CHECK(back.sets[1].samples[7].eta_t[0] == d.sets[1].samples[7].eta_t[0]);
  CHECK(back.boundary.length() == d.boundary.length());
  CHECK(back.metric_id == "conformal");

  const Dataset t = generate_dataset(m, {{"a", vec2(0.1, 0.2)}}, 64, false);
  std::ostringstream o3;
  write_dataset(o3, t);
  std::istringstream in3(o3.str());
  CHECK_FALSE(read_dataset(in3).complete());
}

TEST_CASE("malformed datasets report the line") {
  CHECK(parse_error("hello\n").find("line 1") != std::string::npos);
  CHECK(parse_error(std::string(kHead) + "source a\n0.5 0.1 0.9\nend\nend\n").find("line 6") != std::string::npos);
  CHECK(parse_error(std::string(kHead) + "source a\n0.5 zz 0.9\nend\n").find("line 4") != std::string::npos);
  CHECK(parse_error(std::string(kHead) + "source a\n0.5 0.1 0.9 1 2\nend\n").find("line 4") != std::string::npos);
  CHECK(parse_error(std::string(kHead) + "0.5 0.1 0.9\n").find("line 3") != std::string::npos);
  CHECK(parse_error("#geoscatter-dataset v1\nsource a\n").find("line 2") != std::string::npos);
}

TEST_CASE("truth sidecar") {
  const std::vector<Source> src = {{"src1", vec2(0.1, 1.0 / 3.0)}, {"src2", vec2(-0.5, 0.25)}};
  std::ostringstream out;
  write_truth(out, src);
  std::istringstream in(out.str());
  const auto back = read_truth(in, 2);
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "src1");
  CHECK(back[0].x[1] == 1.0 / 3.0);
}
