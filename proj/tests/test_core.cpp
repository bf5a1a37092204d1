#include <cmath>

#include "doctest.h"
#include "minlen/core.hpp"
#include "minlen/error.hpp"
#include "minlen/numerics.hpp"

using namespace minlen;

namespace {

const double pi = num::kPi;

DensityFn q_density_of(const PureState& s) {
  std::vector<double> v(s.grid().size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::norm(s.amplitudes()[i]);
  return DensityFn(s.grid(), v);
}

}  // namespace

TEST_CASE("params") {
  CHECK(make_params(1.0).q0 == doctest::Approx(pi / 2).epsilon(1e-15));
  CHECK(make_params(0.25).q0 == doctest::Approx(pi).epsilon(1e-15));
  CHECK(std::isinf(make_params(0.0).q0));
  CHECK_FALSE(make_params(0.0).deformed());
  CHECK_THROWS_AS(make_params(-1.0), InvalidParameter);
  CHECK_THROWS_AS(make_params(std::nan("")), InvalidParameter);
}

TEST_CASE("order pairs") {
  CHECK(make_order_pair(2.0, 2.0 / 3.0).nu() == 2.0);
  CHECK(make_order_pair(1.0, 1.0).degenerate());
  CHECK_THROWS_AS(make_order_pair(2.0, 0.7), InvalidParameter);
}

TEST_CASE("catalog states are normalized and match their closed forms") {
  const auto p = make_params(1.0);
  for (CatalogName c : all_catalog_names()) {
    PureState s = catalog_state(c, p, {}, 7);
    CHECK(s.norm2() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(parse_catalog_name(to_string(c)) == c);
  }
  PureState u = catalog_state(CatalogName::UniformQ, p);
  CHECK(std::abs(u.amplitude(0.3) - 1 / std::sqrt(pi)) < 1e-13);
  CHECK(std::abs(u.amplitude(2.0)) == 0.0);
  PureState rc = catalog_state(CatalogName::RaisedCosineQ, p);
  for (double q : {-1.5, -0.2, 0.0, 0.9, 1.55})
    CHECK(std::abs(rc.amplitude(q) - std::sqrt(2 / pi) * std::cos(q)) < 1e-12);
  // phi'(q) = -sqrt(2/pi) sin q
  const double s = rc.grid().map().to_native(0.7);
  CHECK(std::abs(rc.derivative_native(s) + std::sqrt(2 / pi) * std::sin(0.7)) < 1e-10);
}

TEST_CASE("random_fourier_q is reproducible and needs a seed") {
  const auto p = make_params(1.0);
  PureState a = catalog_state(CatalogName::RandomFourierQ, p, {}, 7);
  PureState b = catalog_state(CatalogName::RandomFourierQ, p, {}, 7);
  PureState c = catalog_state(CatalogName::RandomFourierQ, p, {}, 8);
  CHECK(a.amplitude(0.4) == b.amplitude(0.4));
  CHECK(std::abs(a.amplitude(0.4) - c.amplitude(0.4)) > 1e-6);
  CHECK_THROWS_AS(catalog_state(CatalogName::RandomFourierQ, p), InvalidParameter);
  CHECK_THROWS_AS(catalog_state(CatalogName::RandomFourierQ, p, {2.5}, 1), InvalidParameter);
  // the boundary modes vanish at both ends
  CHECK(std::abs(a.amplitude(pi / 2 - 1e-9)) < 1e-7);
}

TEST_CASE("beta = 0 catalog") {
  const auto p = make_params(0.0);
  PureState g = catalog_state(CatalogName::TruncatedGaussianQ, p, {0.5});
  CHECK(g.norm2() == doctest::Approx(1.0).epsilon(1e-13));
  // exp(-q^2/(4 s^2)) normalized: (2 pi s^2)^{-1/4}
  CHECK(std::abs(g.amplitude(0.0) - std::pow(2 * pi * 0.25, -0.25)) < 1e-12);
  CHECK_THROWS_AS(catalog_state(CatalogName::UniformQ, p), InvalidParameter);
}

TEST_CASE("moments") {
  const auto p = make_params(1.0);
  DensityFn v = q_density_of(catalog_state(CatalogName::UniformQ, p));
  MomentValue m2 = moment(v, 2);
  CHECK(m2.value == doctest::Approx(pi * pi / 12).epsilon(1e-12));
  CHECK(m2.est_error < 1e-10);
  CHECK(std::abs(moment(v, 1).value) < 1e-14);
  DensityFn g = q_density_of(catalog_state(CatalogName::TruncatedGaussianQ, make_params(0.0), {0.5}));
  CHECK(moment(g, 2).value == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("normalize") {
  const auto p = make_params(0.5);
  PureState s = catalog_state(CatalogName::RandomFourierQ, p, {3}, 11);
  PureState t = normalize(s.scaled(cplx(0, 5.0)));
  CHECK(t.norm2() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(normalize(t).amplitude(0.2) - t.amplitude(0.2)) < 1e-14);
  CHECK(std::abs(std::abs(t.amplitude(0.2)) - std::abs(s.amplitude(0.2))) < 1e-13);
  CHECK_THROWS_AS(normalize(s.scaled(0.0)), DegenerateState);
}

TEST_CASE("mixtures validate weights and beta") {
  const auto p = make_params(1.0);
  PureState a = catalog_state(CatalogName::UniformQ, p);
  PureState b = catalog_state(CatalogName::RaisedCosineQ, p);
  CHECK_NOTHROW(MixedState({{0.25, a}, {0.75, b}}));
  CHECK_THROWS_AS(MixedState({{0.5, a}, {0.6, b}}), InvalidParameter);
  CHECK_THROWS_AS(MixedState({{0.5, a}, {0.5, catalog_state(CatalogName::UniformQ, make_params(2.0))}}),
                  InvalidParameter);
}

TEST_CASE("normal stream") {
  NormalStream a(3), b(3);
  double m = 0, m2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a.next();
    m += x;
    m2 += x * x;
    if (i < 10) CHECK(x == b.next());
  }
  CHECK(std::abs(m / n) < 0.01);
  CHECK(std::abs(m2 / n - 1) < 0.01);
}
