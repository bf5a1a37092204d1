#include <cmath>

#include "doctest.h"
#include "minlen/entropy.hpp"
#include "minlen/error.hpp"
#include "minlen/measurement.hpp"
#include "minlen/numerics.hpp"
#include "minlen/transform.hpp"

using namespace minlen;

namespace {

const double pi = num::kPi;

// exp(x^2) erfc(x); the continued fraction takes over where exp overflows
double erfcx(double x) {
  if (x < 5.0) return std::exp(x * x) * std::erfc(x);
  double cf = x;
  for (int n = 60; n >= 1; --n) cf = x + 0.5 * n / cf;
  return 1.0 / (std::sqrt(pi) * cf);
}

DensityFn gaussian_x(double s0) {
  Grid g = Grid::uniform(Domain::X, CoordinateMap::identity(), -12 * s0, 12 * s0, 48, 12);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = g.nodes()[i] / s0;
    v[i] = std::exp(-0.5 * x * x) / (s0 * std::sqrt(2 * pi));
  }
  return DensityFn(g, v);
}

RepresentationBundle uniform_bundle(double beta = 1.0) {
  return bundle(MixedState::pure(catalog_state(CatalogName::UniformQ, make_params(beta))));
}

}  // namespace

TEST_CASE("Gaussian acceptance") {
  for (double s : {0.3, 1.0, 2.0}) {
    AcceptanceFn f = gaussian_acceptance(s);
    CHECK(num::integrate_adaptive(f, -20 * s, 20 * s, 1e-15, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f(0.0) == doctest::Approx(1 / (s * std::sqrt(2 * pi))).epsilon(1e-15));
    const double m2 = num::integrate_adaptive([&](double z) { return z * z * f(z); }, -20 * s, 20 * s, 1e-15, 0.0);
    CHECK(m2 == doctest::Approx(s * s).epsilon(1e-12));
  }
  CHECK_THROWS_AS(gaussian_acceptance(0.0), InvalidParameter);
}

TEST_CASE("Gaussian convolved with Gaussian") {
  DensityFn w = gaussian_x(1.5);
  for (double s : {0.1, 1.0, 10.0}) {
    DensityFn W = smear(w, gaussian_acceptance(s));
    CHECK(W.domain() == Domain::Xi);
    const double v = 2.25 + s * s;
    for (double x : {0.0, 1.0, -3.0, 2 * std::sqrt(v)})
      CHECK(W(x) == doctest::Approx(std::exp(-x * x / (2 * v)) / std::sqrt(2 * pi * v)).epsilon(1e-11));
    CHECK(std::abs(W.mass() - 1.0) < 1e-10);
    CHECK(diff_shannon(W).value == doctest::Approx(0.5 * std::log(2 * pi * std::exp(1.0) * v)).epsilon(1e-10));
  }
}

TEST_CASE("Cauchy smeared into a Voigt profile") {
  RepresentationBundle b = uniform_bundle();
  for (double s : {0.1, 1.0, 10.0}) {
    DensityFn M = smear(b.u_k, gaussian_acceptance(s));
    CHECK(M.domain() == Domain::Zeta);
    CHECK(std::abs(M.mass() + M.tail_mass_bound() - 1.0) < 1e-7);
    // Voigt at the origin: erfcx(1/(s sqrt2)) / (s sqrt(2 pi))
    INFO("rel ", (M(0.0) - erfcx(1 / (s * std::sqrt(2.0))) / (s * std::sqrt(2 * pi))) / M(0.0));
    CHECK(M(0.0) == doctest::Approx(erfcx(1 / (s * std::sqrt(2.0))) / (s * std::sqrt(2 * pi))).epsilon(1e-10));
    const double z = 3.7;
    const double direct = num::integrate_adaptive(
        [&](double k) { return gaussian_acceptance(s)(z - k) / (pi * (1 + k * k)); }, z - 12 * s, z + 12 * s, 1e-15, 0.0);
    CHECK(M(z) == doctest::Approx(direct).epsilon(1e-10));
    CHECK(diff_shannon(M).value >= diff_shannon(b.u_k).value - 1e-8);
  }
  DensityFn tiny = smear(b.u_k, gaussian_acceptance(1e-4));
  const double l1 = num::integrate_adaptive([&](double k) { return std::abs(tiny(k) - b.u_k(k)); }, -50, 50, 1e-12, 0.0);
  CHECK(l1 < 1e-3);
}

TEST_CASE("sinc squared smeared keeps its tail") {
  RepresentationBundle b = uniform_bundle();
  for (double s : {0.1, 1.0, 10.0}) {
    AcceptanceFn g = gaussian_acceptance(s);
    DensityFn N = smear(b.w_x, g);
    INFO("sigma ", s);
    CHECK(std::abs(N.mass() - 1.0) < 1e-7);
    for (double x : {0.0, 2.5, 40.0}) {
      const double direct = num::integrate_adaptive([&](double t) { return g(x - t) * b.w_x(t); },
                                                    x - 10 * s, x + 10 * s, 1e-15, 0.0);
      CHECK(N(x) == doctest::Approx(direct).epsilon(1e-9));
    }
    CHECK(diff_shannon(N).value >= diff_shannon(b.w_x).value - 1e-8);
  }
}

TEST_CASE("J profile and S_f") {
  const auto p1 = make_params(1.0);
  Grid z = Grid::uniform(Domain::Zeta, CoordinateMap::identity(), -3, 3, 2, 4);
  for (double j : j_profile(gaussian_acceptance(0.5), make_params(0.0), z)) CHECK(j == 1.0);
  CHECK(j_value(gaussian_acceptance(1e-4), p1, 0.0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(j_value(gaussian_acceptance(1e-4), p1, 2.0) == doctest::Approx(0.2).epsilon(1e-7));
  for (double s : {0.1, 1.0, 7.0}) {
    for (double beta : {0.01, 1.0, 30.0}) {
      const double a = 1 / std::sqrt(2 * s * s * beta);
      const double exact = std::sqrt(pi) * a * erfcx(a);
      AcceptanceFn f = gaussian_acceptance(s);
      const auto p = make_params(beta);
      CHECK(j_value(f, p, 0.0) == doctest::Approx(exact).epsilon(1e-11));
      SupValue sup = s_f_sup(f, p);
      CHECK(sup.argmax == 0.0);
      CHECK(sup.value == doctest::Approx(exact).epsilon(1e-12));
      CHECK(sup.value <= 1.0);
      CHECK(sup.value <= s_f_gaussian_bound(s, beta));
      CHECK(j_value(f, p, 0.8) == doctest::Approx(j_value(f, p, -0.8)).epsilon(1e-13));
    }
  }
  CHECK(s_f(gaussian_acceptance(1.0), make_params(0.0)) == 1.0);
  CHECK(s_f(gaussian_acceptance(1e-5), p1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s_f_gaussian_bound(1.0, pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s_f_gaussian_bound(1.0, 2 * pi) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s_f_gaussian_bound(std::sqrt(pi / 8), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("custom acceptance profiles") {
  // a box of width 1, offset so the profile is not symmetric
  Grid g = Grid::uniform(Domain::Zeta, CoordinateMap::identity(), 0.0, 1.0, 4, 12);
  AcceptanceFn box = AcceptanceFn::custom(DensityFn(g, std::vector<double>(g.size(), 1.0)));
  CHECK(box.sigma() == doctest::Approx(std::sqrt(1.0 / 12)).epsilon(1e-12));
  CHECK_FALSE(box.symmetric());
  const auto p = make_params(1.0);
  // J(zeta) = atan(zeta) - atan(zeta - 1), largest at zeta = 1/2
  SupValue sup = s_f_sup(box, p);
  CHECK(sup.argmax == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sup.value == doctest::Approx(2 * std::atan(0.5)).epsilon(1e-12));
  RepresentationBundle b = uniform_bundle();
  DensityFn M = smear(b.u_k, box);
  CHECK(std::abs(M.mass() + M.tail_mass_bound() - 1.0) < 1e-7);
  CHECK(M(0.3) == doctest::Approx((std::atan(0.3) - std::atan(-0.7)) / pi).epsilon(1e-10));
  CHECK_THROWS_AS(AcceptanceFn::custom(DensityFn(g, std::vector<double>(g.size(), 2.0))), InvalidParameter);
}
