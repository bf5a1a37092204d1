#include <cmath>

#include "doctest.h"
#include "minlen/error.hpp"
#include "minlen/grid.hpp"
#include "minlen/numerics.hpp"

using namespace minlen;

TEST_CASE("tanh Q grid keeps nodes inside the open interval and integrates exactly") {
  const double q0 = num::kPi / 2;
  Grid g = Grid::uniform(Domain::Q, CoordinateMap::tanh_q(q0), -17, 17, 68, 12);
  double sum = 0, q2 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(std::abs(g.nodes()[i]) < q0);
    if (i) CHECK(g.nodes()[i] > g.nodes()[i - 1]);
    CHECK(g.weights()[i] > 0);
    sum += g.weights()[i];
    q2 += g.weights()[i] * g.nodes()[i] * g.nodes()[i];
  }
  CHECK(sum == doctest::Approx(2 * q0).epsilon(1e-12));
  CHECK(q2 / (2 * q0) == doctest::Approx(num::kPi * num::kPi / 12).epsilon(1e-12));
}

TEST_CASE("K map is the image of the Q map and stays accurate at the ends") {
  const double beta = 0.25, q0 = num::kPi / (2 * std::sqrt(beta));
  CoordinateMap mq = CoordinateMap::tanh_q(q0), mk = CoordinateMap::tanh_k(q0, beta);
  for (double s : {-16.0, -3.0, -0.2, 0.0, 0.5, 2.0, 9.0, 16.5}) {
    const double q = mq.to_physical(s);
    const double k = mk.to_physical(s);
    if (std::abs(s) < 5) CHECK(k == doctest::Approx(std::tan(0.5 * q) / 0.5).epsilon(1e-12));
    CHECK(mk.to_native(k) == doctest::Approx(s).epsilon(1e-11));
    CHECK(mk.one_plus_beta_k2(s) == doctest::Approx(1 + beta * k * k).epsilon(1e-11));
    CHECK(mk.log_one_plus_beta_k2(s) ==
          doctest::Approx(std::log1p(beta * k * k)).epsilon(1e-11));
  }
  CHECK_THROWS_AS(mq.to_native(q0), DomainError);
}

TEST_CASE("grid rejects non-increasing breaks and refines by halving") {
  CHECK_THROWS_AS(Grid(Domain::X, CoordinateMap::identity(), {0.0, 0.0}, 4), InvalidParameter);
  Grid g = Grid::uniform(Domain::X, CoordinateMap::identity(), 0, 1, 3, 4);
  Grid r = g.refined();
  CHECK(r.panel_count() == 6);
  CHECK(r.breaks()[1] == doctest::Approx(1.0 / 6));
  CHECK(g.locate(0.5) == 1);
}
