#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "rvm/diagnostics.hpp"
#include "rvm/particles.hpp"

using namespace rvm;
using namespace rvm::diagnostics;

namespace {

ParticleEnsemble gaussian_tail(std::size_t n, std::uint64_t seed, double tail = 9.0) {
  EnsembleSpec s;
  s.count = n;
  s.x_sigma = 0.2;
  s.p_sigma = Vec3(0.4, 0.3, 0.3);
  s.tail_exponent = tail;
  return sample_ensemble(s, seed);
}

// Every particle at momentum magnitude P, cell centers of the grid, with the
// given per-cell masses.
ParticleEnsemble shell(const BinningGrid& g, const std::vector<double>& mass, double P,
                       std::uint64_t seed) {
  ParticleEnsemble e;
  auto r = gen::stream(seed, 0);
  const int m = g.m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const double w = mass[(static_cast<std::size_t>(i) * m + j) * m + k];
        if (w == 0.0) continue;
        const Vec3 c(g.lo + (i + 0.5) * g.h(), g.lo + (j + 0.5) * g.h(), g.lo + (k + 0.5) * g.h());
        // two particles per cell, split unevenly, random directions
        e.add(c, P * r.unit_vector(), 0.3 * w);
        e.add(c + 0.25 * g.h() * Vec3(1, -1, 1), P * r.unit_vector(), 0.7 * w);
      }
  return e;
}

double lq_of_masses(const std::vector<double>& mass, double q, double h) {
  double s = 0.0;
  for (double m : mass) s += std::pow(m / (h * h * h), q) * h * h * h;
  return std::pow(s, 1.0 / q);
}

}  // namespace

TEST_CASE("exponent encoding") {
  CHECK(Exponent(2.0).value() == 2.0);
  CHECK(Exponent::infinity().is_infinite());
  CHECK(Exponent(INFINITY).is_infinite());
  CHECK(Exponent::infinity().str() == "inf");
  CHECK_THROWS_AS(Exponent(0.5), std::invalid_argument);
  CHECK_THROWS_AS(Exponent(NAN), std::invalid_argument);
}

TEST_CASE("trivial norm and moment values") {
  const ParticleEnsemble e = gaussian_tail(5000, 1);
  const BinningGrid g{-1.0, 2.0, 8};
  CHECK(weighted_norm(e, {0.0, Exponent(1.0), g}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(moment(e, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(weighted_norm(ParticleEnsemble{}, {1.0, Exponent::infinity(), g}) == 0.0);
  ParticleEnsemble rest;
  for (int k = 0; k < 10; ++k) rest.add(Vec3(0.01 * k, 0, 0), Vec3::Zero(), 0.1);
  for (double N : {0.0, 1.0, 7.5}) CHECK(moment(rest, N) == doctest::Approx(1.0).epsilon(1e-14));
  ParticleEnsemble hot;
  hot.add(Vec3::Zero(), Vec3(1e200, 0, 0), 1.0);
  CHECK_THROWS_AS(moment(hot, 3.0), std::overflow_error);
  CHECK(total_energy(FieldState(Grid3(1.0, 8)), ParticleEnsemble{}) == 0.0);
}

TEST_CASE("q = 1 norm equals the moment for any grid") {
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto r = gen::stream(61, i);
    const ParticleEnsemble e = gaussian_tail(2000, 100 + i);
    const double theta = r.uniform(0.0, 4.0);
    const BinningGrid g{r.uniform(-2.0, -0.5), r.uniform(1.0, 4.0), 1 + static_cast<int>(r.uniform(0, 12))};
    CHECK(weighted_norm(e, {theta, Exponent(1.0), g}) == moment(e, theta));
  }
}

TEST_CASE("worker count does not change norms") {
  const ParticleEnsemble e = gaussian_tail(30000, 2);
  const NormSpec s{1.5, Exponent(3.0), {-1.0, 2.0, 10}};
  CHECK(weighted_norm(e, s, Executor(1)) == weighted_norm(e, s, Executor(8)));
  CHECK(moment(e, 2.0, Executor(1)) == moment(e, 2.0, Executor(8)));
}

TEST_CASE("uniform ensemble: q = inf times volume equals q = 1") {
  EnsembleSpec s;
  s.count = 400000;
  s.space = EnsembleSpec::Space::Uniform;
  s.box_L = 2.0;
  const ParticleEnsemble e = sample_ensemble(s, 3);
  const BinningGrid g{-1.0, 2.0, 4};
  const double sup = weighted_norm(e, {1.0, Exponent::infinity(), g});
  const double one = weighted_norm(e, {1.0, Exponent(1.0), g});
  // 64 cells of ~6250 particles: relative binning noise ~ 3.5 sigma / sqrt(6250)
  CHECK(sup * 8.0 == doctest::Approx(one).epsilon(0.05));
  CHECK(sup * 8.0 >= one);
}

TEST_CASE("q = inf norm is non-decreasing under refinement") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const ParticleEnsemble e = gaussian_tail(20000, 200 + i);
    double prev = 0.0;
    for (int m : {2, 4, 8, 16, 32}) {
      const double v = weighted_norm(e, {1.0, Exponent::infinity(), {-1.0, 2.0, m}});
      CHECK(v >= prev * (1 - 1e-14));
      prev = v;
    }
  }
}

TEST_CASE("weighted norm is 1-homogeneous in the weights") {
  ParticleEnsemble e = gaussian_tail(5000, 4);
  const NormSpec s{2.0, Exponent(2.5), {-1.0, 2.0, 8}};
  const double a = weighted_norm(e, s);
  for (double& w : e.w) w *= 3.0;
  CHECK(weighted_norm(e, s) == doctest::Approx(3.0 * a).epsilon(1e-13));
}

TEST_CASE("interpolation: monoenergetic closed form") {
  const BinningGrid g{-1.0, 2.0, 4};
  std::vector<double> mass(64, 0.0);
  auto r = gen::stream(62, 0);
  for (double& m : mass) m = r.uniform() < 0.5 ? 0.0 : r.uniform(0.01, 0.1);
  const double P = 7.0, e0 = std::sqrt(1.0 + P * P);
  const ParticleEnsemble e = shell(g, mass, P, 63);
  const double h = g.h();
  for (auto [S, M, q] : {std::tuple{0.0, 2.0, 2.0}, {1.0, 3.0, 3.0}, {0.5, 4.0, 1.5}, {-1.0, 1.0, 1.0}}) {
    const double a = (S + 3) / (M + 3);
    const InequalityValue v = check_interpolation(e, S, M, q, g);
    const double lhs = std::pow(e0, S) * lq_of_masses(mass, q, h);
    const double rhs = std::pow(std::pow(e0, M) * lq_of_masses(mass, a * q, h), a);
    CHECK(v.lhs == doctest::Approx(lhs).epsilon(1e-12));
    CHECK(v.rhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // One occupied cell of mass m: ratio = p0^(S - aM) m^(1 - a) h^(3(a - 1)).
  std::vector<double> one(64, 0.0);
  one[21] = 0.4;
  const ParticleEnsemble e1 = shell(g, one, P, 64);
  const double S = 1.0, M = 4.0, a = (S + 3) / (M + 3);
  CHECK(check_interpolation(e1, S, M, 2.0, g).ratio() ==
        doctest::Approx(std::pow(e0, S - a * M) * std::pow(0.4, 1 - a) * std::pow(h, 3 * (a - 1))).epsilon(1e-12));
}

TEST_CASE("interpolation: S = M is an identity") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    auto r = gen::stream(65, i);
    const ParticleEnsemble e = gaussian_tail(3000, 300 + i);
    const double S = r.uniform(-2.5, 4.0), q = r.uniform(1.0, 5.0);
    CHECK(check_interpolation(e, S, S, q, {-1.0, 2.0, 8}).ratio() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("interpolation: parameter contract") {
  const ParticleEnsemble e = gaussian_tail(100, 5);
  const BinningGrid g;
  CHECK_THROWS_AS(check_interpolation(e, -3.0, 1.0, 2.0, g), std::invalid_argument);
  CHECK_THROWS_AS(check_interpolation(e, 2.0, 1.0, 2.0, g), std::invalid_argument);
  CHECK_THROWS_AS(check_interpolation(e, 0.0, 1.0, 0.5, g), std::invalid_argument);
  CHECK_THROWS_AS(check_interpolation(e, 0.0, 1.0, INFINITY, g), std::invalid_argument);
}

TEST_CASE("special case: ratio is invariant under spatial dilation") {
  // x -> mu x with w -> mu^3 w keeps the phase-space density values; with the
  // binning grid dilated too, both sides scale as mu^(3 (S+3)/(M+3)).
  for (std::uint64_t i = 0; i < 10; ++i) {
    auto r = gen::stream(66, i);
    const ParticleEnsemble e = gaussian_tail(4000, 400 + i);
    const double S = r.uniform(0.0, 2.0), M = S + r.uniform(0.0, 4.0);
    const double mu = gen::log_uniform(r, 0.1, 10.0);
    const BinningGrid g{-1.0, 2.0, 8};
    ParticleEnsemble d = e;
    for (auto& x : d.x) x *= mu;
    for (auto& w : d.w) w *= mu * mu * mu;
    const BinningGrid gd{g.lo * mu, g.L * mu, g.m};
    const double a = check_interpolation_special(e, S, M, g).ratio();
    const double b = check_interpolation_special(d, S, M, gd).ratio();
    CHECK(b == doctest::Approx(a).epsilon(1e-10));
  }
}

TEST_CASE("moment bound: contract and closed form") {
  const ParticleEnsemble e = gaussian_tail(2000, 6);
  const BinningGrid g{-1.0, 2.0, 8};
  try {
    check_prop81(e, {0.5, 1.0, 1.5, 2.0, 4.0}, g);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& ex) {
    CHECK(std::string(ex.what()).find("q*eta") != std::string::npos);
  }
  try {
    check_prop81(e, {0.25, 3.0, 0.1, 2.0, 4.0}, g);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& ex) {
    CHECK(std::string(ex.what()).find("sigma >=") != std::string::npos);
  }
  CHECK_THROWS_AS(validate_prop81({0.0, 1.0, 1.0, 2.0, 4.0}), std::invalid_argument);

  std::vector<double> mass(64, 0.0);
  auto r = gen::stream(67, 0);
  for (double& m : mass) m = r.uniform(0.0, 0.05);
  const double P = 3.0, e0 = std::sqrt(1.0 + P * P);
  const ParticleEnsemble s = shell({-1.0, 2.0, 4}, mass, P, 68);
  const Prop81Spec spec{0.25, 1.0, 1.5, 2.0, 4.0};
  const InequalityValue v = check_prop81(s, spec, {-1.0, 2.0, 4});
  double W = 0.0;
  for (double m : mass) W += m;
  const double nq = lq_of_masses(mass, spec.q, 0.5);
  CHECK(v.lhs == doctest::Approx(std::pow(e0, spec.rho) * nq).epsilon(1e-12));
  CHECK(v.rhs == doctest::Approx(std::pow(std::pow(e0, spec.sigma) * nq, 1 - spec.q * spec.eta) *
                                 std::pow(std::pow(e0, spec.N) * W, spec.eta))
                     .epsilon(1e-12));
}

TEST_CASE("free streaming leaves moments and constant-weight norms unchanged") {
  ParticleEnsemble e = gaussian_tail(5000, 7);
  const std::vector<double> N{0.0, 1.0, 2.0, 5.5};
  std::vector<double> m0;
  for (double n : N) m0.push_back(moment(e, n));
  const double total = e.total_weight();
  for (int s = 0; s < 20; ++s)
    for (std::size_t k = 0; k < e.size(); ++k) e.x[k] += 0.05 * vhat(Momentum(e.p[k]));
  for (std::size_t i = 0; i < N.size(); ++i) CHECK(moment(e, N[i]) == doctest::Approx(m0[i]).epsilon(1e-12));
  CHECK(e.total_weight() == total);
}

TEST_CASE("moment estimate: trivial series") {
  std::vector<MomentSample> run;
  for (int i = 0; i <= 10; ++i) run.push_back({0.1 * i, 2.0, 0.0, 0.0});
  const auto pts = check_moment_estimate(run, 2.0);
  REQUIRE(pts.size() == run.size());
  for (const auto& p : pts) {
    CHECK(p.lhs == 2.0);
    CHECK(p.rhs == 2.0);
  }
  // constant norms: (c t)^(N+3) after trapezoid integration, which is exact
  std::vector<MomentSample> driven;
  for (int i = 0; i <= 4; ++i) driven.push_back({0.25 * i, 1.0 + (i == 2 ? 0.5 : 0.0), 2.0, 1.0});
  const auto d = check_moment_estimate(driven, 0.0);
  CHECK(d.back().lhs == 1.5);
  CHECK(d.back().rhs == doctest::Approx(1.0 + 8.0 + 1.0).epsilon(1e-14));
  CHECK(check_moment_estimate({}, 1.0).empty());
}

TEST_CASE("field norms on nodes") {
  const Grid3 g(2.0, 8);
  FieldState f(g);
  for (double& v : f[Ey]) v = 3.0;
  for (double& v : f[Bz]) v = -2.0;
  const FieldNorms n = field_lr_norms(f, 4.0);
  CHECK(n.E == doctest::Approx(3.0 * std::pow(8.0, 0.25)).epsilon(1e-14));
  CHECK(n.B == doctest::Approx(2.0 * std::pow(8.0, 0.25)).epsilon(1e-14));
}
