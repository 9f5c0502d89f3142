#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "specgap/domain.hpp"
#include "specgap/grid.hpp"
#include "specgap/potential.hpp"
#include "specgap/modulus.hpp"

using namespace specgap;

namespace {
Point pt(double x, double y = 0, double z = 0) {
  Point p;
  p << x, y, z;
  return p;
}
}  // namespace

TEST_CASE("diameter of the basic domains") {
  CHECK(ConvexDomain::rectangle({1, 1}).diameter() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(ConvexDomain::disc(0, 0, 1).diameter() == 2.0);
  CHECK(ConvexDomain::interval(-0.5, 0.5).diameter() == 1.0);
}

TEST_CASE("rectangle diameter equals the norm of the widths vector exactly") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 50; ++t) {
    const double w1 = 0.1 + 3.0 * std::ldexp(static_cast<double>(rng()), -64);
    const double w2 = 0.1 + 3.0 * std::ldexp(static_cast<double>(rng()), -64);
    const auto dom = ConvexDomain::rectangle({w1, w2});
    CHECK(dom.diameter() == std::sqrt(w1 * w1 + w2 * w2));
  }
}

TEST_CASE("polygon validation and diameter") {
  const std::vector<Eigen::Vector2d> tri = {{0, 0}, {1, 0}, {0.2, 0.9}};
  const auto dom = ConvexDomain::polygon(tri);
  CHECK(dom.diameter() == doctest::Approx(std::sqrt(1.45)).epsilon(1e-12));
  // Clockwise ordering and collinear points must be rejected.
  CHECK_THROWS(ConvexDomain::polygon({{0, 0}, {0.2, 0.9}, {1, 0}}));
  CHECK_THROWS(ConvexDomain::polygon({{0, 0}, {0.5, 0}, {1, 0}, {0.5, 1}}));
}

TEST_CASE("domain invariants") {
  CHECK_THROWS(ConvexDomain::interval(1, 1));
  CHECK_THROWS(ConvexDomain::rectangle({1, -1}));
  CHECK_THROWS(ConvexDomain::disc(0, 0, 0));
}

TEST_CASE("parse of the double well matches the builtin expansion") {
  const auto parsed = parse_expression("-1*x1^2 + 0.5*x1^4", 1);
  const auto builtin = expr_fold(Potential::double_well(1.0, 0.5).as_expression(1));
  CHECK(expr_equal(parsed, builtin));
}

TEST_CASE("parse errors carry byte offsets and expected tokens") {
  CHECK_THROWS_AS(parse_expression("x3", 2), ParseError);
  try {
    parse_expression("x3", 2);
  } catch (const ParseError& e) {
    CHECK(e.offset == 0);
    CHECK(!e.expected.empty());
    CHECK(std::string(e.what()).find("exceeds dimension") != std::string::npos);
  }
  try {
    parse_expression("1 + bogus(2)", 1);
  } catch (const ParseError& e) {
    CHECK(e.offset == 4);
  }
  try {
    parse_expression("(1 + 2", 1);
  } catch (const ParseError& e) {
    CHECK(e.expected == std::vector<std::string>{")"});
  }
}

TEST_CASE("expression evaluation") {
  const auto e = parse_expression("0.5*(x1^2 + x2^2)", 2);
  CHECK(expr_eval(e, pt(1, 1), 2) == doctest::Approx(1.0).epsilon(1e-15));
  const auto f = parse_expression("min(x1, 2) + max(x1, 3) * tanh(0)", 1);
  CHECK(expr_eval(f, pt(5), 1) == doctest::Approx(2.0));
}

TEST_CASE("parse -> print -> parse is a fixed point") {
  const char* cases[] = {
      "-1*x1^2 + 0.5*x1^4",
      "sin(x1)*cos(x2) - exp(-r^2)",
      "min(x1, max(x2, 0.25)) / (1 + abs(x1))",
      "sqrt(x1^2 + 1e-3) ^ 1.5",
      "tanh(2*x1) - 3",
      "-(x1 - 0.125)^3",
  };
  for (const char* s : cases) {
    const auto e1 = parse_expression(s, 2);
    const std::string printed = expr_print(e1);
    const auto e2 = parse_expression(printed, 2);
    CHECK(expr_equal(e1, e2));
    CHECK(expr_print(e2) == printed);
  }
}

TEST_CASE("builtin potential values and analytic gradients") {
  const auto q = Potential::quadratic(2.0);
  CHECK(q.value(pt(1, 0), 2) == doctest::Approx(1.0));
  Point g = q.gradient(pt(1, 0), 2);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(0.0));

  const auto dw = Potential::double_well(1.0, 1.0);
  CHECK(dw.value(pt(0), 1) == 0.0);
  CHECK(dw.gradient(pt(0), 1)[0] == doctest::Approx(0.0));
}

TEST_CASE("central-difference gradient of x1^2 at 3") {
  auto p = Potential::parse("x1^2", 1);
  p.set_gradient_mode(Potential::GradientMode::CentralDifference, 1e-4);
  CHECK(p.gradient(pt(3), 1)[0] == doctest::Approx(6.0).epsilon(1e-6 / 6.0));
}

TEST_CASE("analytic gradients match central differences for every builtin") {
  const double hg = 1e-4;
  std::mt19937_64 rng(7);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * std::ldexp(static_cast<double>(rng()), -64);
  };
  const Potential pots[] = {
      Potential::zero(),
      Potential::quadratic(2.0),
      Potential::double_well(1.0, 1.0),
      Potential::radial_plus_transverse(Potential::double_well(1.0, 1.0), 5.0),
  };
  // Third derivatives of these quartic-in-r potentials stay below ~200 on
  // the unit ball; 10 h^2 times that bounds a 2nd-order difference, and the
  // 4th-order stencil in use is tighter still. A small absolute floor
  // absorbs roundoff in the difference quotients.
  const double scale = 200.0;
  for (const auto& p : pots) {
    Potential cd = p;
    cd.set_gradient_mode(Potential::GradientMode::CentralDifference, hg);
    for (int t = 0; t < 100; ++t) {
      const Point x = pt(uni(-0.7, 0.7), uni(-0.7, 0.7));
      const Point ga = p.gradient(x, 2), gn = cd.gradient(x, 2);
      for (int ax = 0; ax < 2; ++ax)
        CHECK(std::abs(ga[ax] - gn[ax]) <= 10 * hg * hg * scale + 1e-9);
    }
  }
}

TEST_CASE("expression dual-number gradient agrees with central differences") {
  auto p = Potential::parse("sin(x1)*exp(x2) + r^2 - tanh(x1*x2)", 2);
  Potential cd = p;
  cd.set_gradient_mode(Potential::GradientMode::CentralDifference, 1e-5);
  std::mt19937_64 rng(13);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * std::ldexp(static_cast<double>(rng()), -64);
  };
  for (int t = 0; t < 50; ++t) {
    const Point x = pt(uni(0.1, 0.9), uni(0.1, 0.9));
    const Point ga = p.gradient(x, 2), gn = cd.gradient(x, 2);
    for (int ax = 0; ax < 2; ++ax) CHECK(ga[ax] == doctest::Approx(gn[ax]).epsilon(1e-8));
  }
}

TEST_CASE("grid nodes are strictly interior with positive boundary gaps") {
  const auto dom = ConvexDomain::disc(0, 0, 1);
  const Grid grid(dom, 1.0 / 24);
  CHECK(grid.size() > 0);
  for (int i = 0; i < grid.size(); ++i) {
    const Point& x = grid.pos(i);
    CHECK(x[0] * x[0] + x[1] * x[1] < 1.0);
    for (int ax = 0; ax < 2; ++ax)
      for (int side = 0; side < 2; ++side) {
        const GridLink& l = grid.link(i, ax, side);
        CHECK(l.gap > 0.0);
        CHECK(l.gap <= grid.spacing(ax) * (1 + 1e-12));
        if (l.neighbor >= 0) CHECK(l.gap == grid.spacing(ax));
      }
  }
}

TEST_CASE("aligned interval grid") {
  const auto dom = ConvexDomain::interval(-0.5, 0.5);
  const Grid grid(dom, 1.0 / 64);
  CHECK(grid.size() == 63);
  CHECK(grid.spacing(0) == doctest::Approx(1.0 / 64));
  int boundary_touch = 0;
  for (int i = 0; i < grid.size(); ++i)
    if (grid.near_boundary(i)) ++boundary_touch;
  CHECK(boundary_touch == 2);
}

TEST_CASE("grid-sampled potential interpolates and rejects outside points") {
  const auto dom = ConvexDomain::rectangle({1, 1});
  auto grid = std::make_shared<Grid>(dom, 1.0 / 16);
  Vector vals(grid->size());
  for (int i = 0; i < grid->size(); ++i) vals[i] = grid->pos(i)[0] + 2 * grid->pos(i)[1];
  const auto p = Potential::grid_sampled(grid, vals);
  CHECK(p.value(pt(0.11, 0.07), 2) == doctest::Approx(0.11 + 0.14).epsilon(1e-12));
  CHECK_THROWS(p.value(pt(0.49999, 0.49999), 2));
}

TEST_CASE("modulus function sampling, interpolation and pole cutoff") {
  const double half = 0.5;
  const auto m = ModulusFn::from_function(half, [](double z) { return z * z; }, 257);
  CHECK(m(0.25) == doctest::Approx(0.0625).epsilon(1e-4));
  CHECK_THROWS(m(0.51));

  const double pi = 3.14159265358979323846;
  const auto poled = ModulusFn::from_function(
      half, [&](double z) { return -std::tan(pi * z); }, 512, true, 0.45);
  CHECK(poled.has_pole());
  CHECK(poled.z_cut() == doctest::Approx(0.45));
  CHECK_THROWS(poled(0.46));
  CHECK(poled(0.2) == doctest::Approx(-std::tan(pi * 0.2)).epsilon(1e-4));
}

TEST_CASE("potential evenness check") {
  CHECK(is_even_potential(Potential::parse("x1^2", 1), 0.5));
  CHECK(!is_even_potential(Potential::parse("x1", 1), 0.5));
  CHECK(is_even_potential(Potential::double_well(1, 1), 1.0));
}

TEST_CASE("grid csv dump") {
  const auto dom = ConvexDomain::interval(0, 1);
  const Grid grid(dom, 0.25);
  Vector v = Vector::LinSpaced(grid.size(), 0, 1);
  const std::string path = "test_grid_dump.csv";
  write_grid_csv(grid, v, path);
  std::FILE* f = std::fopen(path.c_str(), "r");
  REQUIRE(f != nullptr);
  char line[128];
  REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
  CHECK(std::string(line).find("x1,value") == 0);
  std::fclose(f);
  std::remove(path.c_str());
}
