#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "optomech/errors.hpp"
#include "optomech/spectral.hpp"
#include "oracle_values.hpp"

using namespace optomech;
using namespace optomech::spectral;
using fixtures::kGamma;
using fixtures::kKappa;
using fixtures::kOmegaM;
using fixtures::rel;
using cd = std::complex<double>;

namespace {

SystemModel uncoupled() { return fixtures::with_G({{1.0, 0.0}}); }

SpectralErrc spectral_code(auto&& fn) {
  try {
    fn();
  } catch (const SpectralError& e) {
    return e.code();
  }
  FAIL("expected SpectralError");
  return SpectralErrc::InvalidGrid;
}

cd finite_difference(const SystemModel& sys, double d) {
  const double h = 1e-6 * kKappa;
  return (probe_response(sys, d + h).eps_out_plus - probe_response(sys, d - h).eps_out_plus) / (2.0 * h);
}

}  // namespace

TEST_CASE("bare cavity Lorentzian") {
  const auto r = probe_response(uncoupled(), kOmegaM);
  CHECK(r.v_p == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r.v_tilde_p == doctest::Approx(0.0));
  CHECK(std::abs(response_derivative(uncoupled(), kOmegaM) - cd(0.0, 2.0 / kKappa)) < 1e-15 / kKappa);
  const double off = kOmegaM + 50.0 * kKappa;
  CHECK(std::abs(group_velocity(uncoupled(), off) - 1.0) < 0.1);
}

TEST_CASE("response matches the independent oracle") {
  const auto two = fixtures::two();
  const auto six = fixtures::unequal();
  CHECK(rel(probe_response(two, 0.97 * kOmegaM).eps_out_plus, oracle::kTwoResponse0p97) < 1e-12);
  CHECK(rel(probe_response(two, 1.02 * kOmegaM).eps_out_plus, oracle::kTwoResponse1p02) < 1e-12);
  CHECK(rel(probe_response(two, 1.1 * kOmegaM).eps_out_plus, oracle::kTwoResponse1p1) < 1e-12);
  CHECK(rel(probe_response(six, 0.97 * kOmegaM).eps_out_plus, oracle::kSixResponse0p97) < 1e-12);
  CHECK(rel(probe_response(six, 1.02 * kOmegaM).eps_out_plus, oracle::kSixResponse1p02) < 1e-12);
  CHECK(rel(probe_response(six, 1.1 * kOmegaM).eps_out_plus, oracle::kSixResponse1p1) < 1e-12);
}

TEST_CASE("quadratures are the real and imaginary parts") {
  const auto r = probe_response(fixtures::two(), 1.01 * kOmegaM);
  CHECK(r.v_p == r.eps_out_plus.real());
  CHECK(r.v_tilde_p == r.eps_out_plus.imag());
  CHECK(r.delta == 1.01 * kOmegaM);
}

TEST_CASE("deep dip at a membrane frequency") {
  CHECK(probe_response(fixtures::two(), 1.05 * kOmegaM).v_p < 0.01);
  CHECK(probe_response(fixtures::two(), 0.95 * kOmegaM).v_p < 0.01);
}

TEST_CASE("group velocity matches the oracle") {
  const auto two = fixtures::two();
  CHECK(rel(group_velocity(two, 1.05 * kOmegaM), oracle::kTwoVg1p05) < 1e-9);
  CHECK(rel(group_velocity(two, 0.95 * kOmegaM), oracle::kTwoVg0p95) < 1e-9);
  CHECK(rel(group_velocity(fixtures::unequal(), kOmegaM), oracle::kSixVg1p0) < 1e-9);
}

TEST_CASE("divergent group velocity is reported") {
  // bracket a sign change of the denominator 1 + v~/2 + (delta/2) dv~/ddelta
  const auto sys = fixtures::two();
  auto den = [&](double d) {
    return 1.0 + probe_response(sys, d).v_tilde_p / 2.0 + d / 2.0 * response_derivative(sys, d).imag();
  };
  double lo = 1.05 * kOmegaM, hi = 1.05 * kOmegaM + kKappa;
  REQUIRE(den(lo) * den(hi) < 0.0);
  for (int i = 0; i < 200 && hi > std::nextafter(lo, hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (den(mid) * den(lo) > 0.0 ? lo : hi) = mid;
  }
  const double root = std::abs(den(lo)) < std::abs(den(hi)) ? lo : hi;
  REQUIRE(std::abs(den(root)) < 1e-12);
  CHECK(spectral_code([&] { (void)group_velocity(sys, root); }) == SpectralErrc::DivergentGroupVelocity);
}

TEST_CASE("analytic derivative agrees with finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.8, 1.2);
  for (const auto& sys : {fixtures::two(), fixtures::three(), fixtures::four(), fixtures::unequal(),
                          fixtures::triple()}) {
    for (int i = 0; i < 100; ++i) {
      const double d = u(rng) * kOmegaM;
      CHECK(rel(response_derivative(sys, d), finite_difference(sys, d)) < 1e-5);
    }
  }
}

TEST_CASE("magnitude never exceeds two") {
  for (const auto& sys : {fixtures::two(), fixtures::four(), fixtures::unequal(), uncoupled()}) {
    const auto sweep = evaluate_spectrum(sys, uniform_grid(0.5 * kOmegaM, 1.5 * kOmegaM, 20001));
    double peak = 0.0;
    for (const auto& r : sweep.responses) peak = std::max(peak, std::abs(r.eps_out_plus));
    CHECK(peak <= 2.0 + 1e-14);
  }
}

TEST_CASE("membrane order does not matter") {
  const auto a = fixtures::with_G({{1.05, 0.2}, {1.0, 0.4}, {0.95, 0.7}});
  const auto b = fixtures::with_G({{0.95, 0.7}, {1.05, 0.2}, {1.0, 0.4}});
  for (double x : {0.9, 0.95, 0.99, 1.0, 1.03, 1.05, 1.1}) {
    CHECK(rel(probe_response(a, x * kOmegaM).eps_out_plus, probe_response(b, x * kOmegaM).eps_out_plus) < 1e-14);
  }
}

TEST_CASE("identical membranes collapse to one with sqrt(N) G") {
  for (int n = 1; n <= 5; ++n) {
    std::vector<std::pair<double, double>> modes(static_cast<std::size_t>(n), {1.0, 0.3});
    std::vector<MembraneMode> ms;
    for (const auto& [w, G] : modes) ms.push_back({w * kOmegaM, kGamma, G * kKappa / fixtures::c0_abs()});
    const auto many = build_system(fixtures::cavity(), ms, fixtures::drive());
    const auto one = fixtures::with_G({{1.0, 0.3 * std::sqrt(static_cast<double>(n))}});
    double worst = 0.0;
    for (double d : uniform_grid(0.8 * kOmegaM, 1.2 * kOmegaM, 4001)) {
      worst = std::max(worst, std::abs(probe_response(many, d).eps_out_plus - probe_response(one, d).eps_out_plus));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("degenerate group merges with root-sum-square coupling") {
  const auto split = fixtures::with_G({{1.05, 0.4}, {0.95, 0.3}, {0.95, 0.5}});
  // the uncoupled third mode keeps the mean frequency unchanged
  const auto merged = fixtures::with_G({{1.05, 0.4}, {0.95, std::sqrt(0.09 + 0.25)}, {0.95, 0.0}});
  for (double x : {0.9, 0.95, 1.0, 1.05}) {
    CHECK(std::abs(probe_response(split, x * kOmegaM).eps_out_plus -
                   probe_response(merged, x * kOmegaM).eps_out_plus) < 1e-12);
  }
}

TEST_CASE("analytic linewidth") {
  const auto sys = fixtures::two();
  CHECK(fwhm_analytic(sys, 0) == doctest::Approx(kGamma + 0.16 * kKappa));
  CHECK(fwhm_analytic(uncoupled(), 0) == kGamma);
  const auto trio = fixtures::triple();
  CHECK(fwhm_analytic(trio, 1, true) == doctest::Approx(kGamma + 3.0 * 0.16 * kKappa));
  CHECK(fwhm_analytic(trio, 1, false) == doctest::Approx(kGamma + 0.16 * kKappa));
  CHECK(spectral_code([&] { (void)fwhm_analytic(sys, 2); }) == SpectralErrc::IndexOutOfRange);

  std::vector<MembraneMode> ms{{kOmegaM, kGamma, 0.001 * kKappa}};
  const auto lo = build_system(fixtures::cavity(), ms, fixtures::drive());
  const auto hi = build_system(fixtures::cavity(), ms, fixtures::drive(1e-3, 2.0 * fixtures::kPower));
  CHECK((fwhm_analytic(hi, 0) - kGamma) / (fwhm_analytic(lo, 0) - kGamma) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("two windows at the membrane frequencies") {
  const auto sys = fixtures::two();
  const auto sweep = sweep_spectrum(sys, 0.8 * kOmegaM, 1.2 * kOmegaM, 4001);
  REQUIRE(sweep.windows.size() == 2);
  CHECK(std::abs(sweep.windows[0].center_delta / kOmegaM - 0.95) < 1e-3);
  CHECK(std::abs(sweep.windows[1].center_delta / kOmegaM - 1.05) < 1e-3);
  for (const auto& w : sweep.windows) {
    CHECK(rel(w.fwhm_measured, w.fwhm_analytic) < 0.15);
    CHECK(w.depth < 0.5 * w.local_max);
    CHECK(response_derivative(sys, w.center_delta).imag() < 0.0);
  }
}

TEST_CASE("window counts of the multi-membrane configurations") {
  auto count = [](const SystemModel& s) { return sweep_spectrum(s, 0.8 * kOmegaM, 1.2 * kOmegaM, 4001).windows.size(); };
  CHECK(count(fixtures::three()) == 3);
  CHECK(count(fixtures::four()) == 4);
  CHECK(count(fixtures::unequal()) == 3);
  CHECK(count(fixtures::triple()) == 2);
  CHECK(count(uncoupled()) == 0);
}

TEST_CASE("negative slope at every window centre") {
  for (const auto& sys : {fixtures::two(), fixtures::three(), fixtures::four(), fixtures::unequal(),
                          fixtures::triple()}) {
    for (const auto& w : sweep_spectrum(sys, 0.8 * kOmegaM, 1.2 * kOmegaM, 4001).windows) {
      CHECK(response_derivative(sys, w.center_delta).imag() < 0.0);
    }
  }
}

TEST_CASE("window count equals N for separated weakly coupled membranes") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> pick_n(1, 6);
  std::uniform_real_distribution<double> pick_G(0.1, 0.65);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = pick_n(rng);
    std::vector<MembraneMode> ms;
    double widest = 0.0;
    std::vector<double> Gs;
    for (int k = 0; k < n; ++k) {
      const double G = pick_G(rng) * kKappa;
      Gs.push_back(G);
      widest = std::max(widest, kGamma + G * G / kKappa);
    }
    const double spacing = 2.5 * widest;
    for (int k = 0; k < n; ++k) {
      const double w = kOmegaM + (k - 0.5 * (n - 1)) * spacing;
      ms.push_back({w, kGamma, Gs[k] / fixtures::c0_abs()});
    }
    const auto sys = build_system(fixtures::cavity(), ms, fixtures::drive());
    const double lo = ms.front().omega - 3.0 * spacing, hi = ms.back().omega + 3.0 * spacing;
    const auto pts = std::max<std::size_t>(4001, required_grid_points(sys, lo, hi));
    CHECK(sweep_spectrum(sys, lo, hi, pts).windows.size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("parallel evaluation is bit-identical") {
  const auto sys = fixtures::four();
  const auto grid = uniform_grid(0.8 * kOmegaM, 1.2 * kOmegaM, 10001);
  const auto a = evaluate_spectrum(sys, grid, 1);
  const auto b = evaluate_spectrum(sys, grid, 7);
  REQUIRE(a.responses.size() == b.responses.size());
  bool same = true;
  for (std::size_t i = 0; i < a.responses.size(); ++i) {
    same = same && a.responses[i].eps_out_plus == b.responses[i].eps_out_plus;
  }
  CHECK(same);
}

TEST_CASE("grid errors") {
  const auto sys = fixtures::two();
  CHECK(spectral_code([&] { (void)uniform_grid(1.0, 0.5, 10); }) == SpectralErrc::InvalidGrid);
  CHECK(spectral_code([&] { (void)uniform_grid(0.0, 1.0, 1); }) == SpectralErrc::InvalidGrid);
  CHECK(spectral_code([&] { (void)evaluate_spectrum(sys, {1.0, 1.0}); }) == SpectralErrc::InvalidGrid);
  CHECK(spectral_code([&] { (void)probe_response(sys, std::nan("")); }) == SpectralErrc::InvalidGrid);

  const auto narrow = fixtures::with_G({{1.05, 0.02}, {0.95, 0.02}});
  const std::size_t need = required_grid_points(narrow, 0.8 * kOmegaM, 1.2 * kOmegaM);
  CHECK(need > 4001);
  try {
    (void)sweep_spectrum(narrow, 0.8 * kOmegaM, 1.2 * kOmegaM, 4001);
    FAIL("expected GridTooCoarse");
  } catch (const SpectralError& e) {
    CHECK(e.code() == SpectralErrc::GridTooCoarse);
    REQUIRE(e.required_points());
    CHECK(*e.required_points() == need);
  }
  CHECK(sweep_spectrum(narrow, 0.8 * kOmegaM, 1.2 * kOmegaM, need).windows.size() == 2);
}
