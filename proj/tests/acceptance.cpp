// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/spectral.hpp"

#ifdef OPTOMECH_WITH_CLI
#include "optomech/cli/app.hpp"
#include "optomech/cli/scenario.hpp"
#endif

using namespace optomech;
using fixtures::kKappa;
using fixtures::kOmegaM;
using cd = std::complex<double>;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol * std::abs(target); }

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (s >= limit_s) {
    out.ok = false;
    out.detail += fmt("; runtime over the %.0f s budget", limit_s);
  }
  if (!out.ok) ++failures;
  std::printf("%s %2d %s: %s [%.2f s, budget %.0f s]\n", out.ok ? "PASS" : "FAIL", id, title,
              out.detail.c_str(), s, limit_s);
  std::fflush(stdout);
}

Outcome vg_check(const SystemModel& sys, std::initializer_list<std::pair<double, double>> points) {
  Outcome o;
  for (const auto& [x, expected] : points) {
    const double vg = spectral::group_velocity(sys, x * kOmegaM);
    o.require(within(vg, expected, 0.05), fmt("vg(%.2f)=%.5f vs %.4f", x, vg, expected));
  }
  return o;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

std::size_t index_at(const std::vector<double>& times, double t) {
  return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
}

}  // namespace

int main() {
  criterion(1, "group velocity, two membranes", 1.0, [] {
    return vg_check(fixtures::two(), {{1.05, -0.0155}, {0.95, -0.0171}});
  });

  criterion(2, "group velocity, three unequal couplings", 1.0, [] {
    return vg_check(fixtures::unequal(), {{1.05, -0.0038}, {1.0, -0.0163}, {0.95, -0.0544}});
  });

  criterion(3, "triple degeneracy, two windows", 5.0, [] {
    const auto sys = fixtures::triple();
    Outcome o = vg_check(sys, {{1.05, -0.015}, {0.95, -0.053}});
    const auto n = spectral::sweep_spectrum(sys, 0.8 * kOmegaM, 1.2 * kOmegaM, 4001).windows.size();
    o.require(n == 2, fmt("windows=%zu", n));
    return o;
  });

  criterion(4, "FWHM from physical inputs", 1.0, [] {
    const auto sys = fixtures::storage();
    Outcome o;
    for (std::size_t n = 0; n < sys.size(); ++n) {
      const double hz = spectral::fwhm_analytic(sys, n) / kTwoPi;
      o.require(within(hz, 1678.0, 0.02), fmt("membrane %zu: %.2f Hz vs 1678 Hz", n + 1, hz));
    }
    return o;
  });

  criterion(5, "window count equals N on random configurations", 30.0, [] {
    std::mt19937_64 rng(20240515);
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_real_distribution<double> coupling(0.05, 0.7);
    std::uniform_real_distribution<double> gap(2.05, 4.0);
    int bad = 0;
    std::string first;
    for (int trial = 0; trial < 200; ++trial) {
      const int N = count(rng);
      std::vector<double> G(static_cast<std::size_t>(N));
      double widest = 0.0;
      for (auto& g : G) {
        g = coupling(rng) * kKappa;
        widest = std::max(widest, fixtures::kGamma + g * g / kKappa);
      }
      std::vector<double> omega{0.0};
      for (int n = 1; n < N; ++n) omega.push_back(omega.back() + gap(rng) * widest);
      const double shift = kOmegaM - 0.5 * omega.back();
      std::vector<MembraneMode> ms;
      for (int n = 0; n < N; ++n) {
        const auto k = static_cast<std::size_t>(n);
        ms.push_back({omega[k] + shift, fixtures::kGamma, G[k] / fixtures::c0_abs()});
      }
      const auto sys = build_system(fixtures::cavity(), ms, fixtures::drive());
      const double lo = shift - 3.0 * widest;
      const double hi = omega.back() + shift + 3.0 * widest;
      const auto points = std::max<std::size_t>(4001, spectral::required_grid_points(sys, lo, hi));
      const auto found = spectral::sweep_spectrum(sys, lo, hi, points).windows.size();
      if (found != static_cast<std::size_t>(N)) {
        if (bad++ == 0) first = fmt("trial %d: N=%d found %zu", trial, N, found);
      }
    }
    Outcome o;
    o.require(bad == 0, fmt("200 instances, %d failures", bad) + (first.empty() ? "" : " (" + first + ")"));
    return o;
  });

  criterion(6, "identical membranes merge into one", 1.0, [] {
    Outcome o;
    double worst = 0.0;
    for (int N = 2; N <= 6; ++N) {
      std::vector<MembraneMode> many;
      const double g = 0.3 * kKappa / fixtures::c0_abs();
      for (int n = 0; n < N; ++n) many.push_back({kOmegaM, fixtures::kGamma, g});
      const std::vector<MembraneMode> one{{kOmegaM, fixtures::kGamma, std::sqrt(double(N)) * g}};
      const auto a = build_system(fixtures::cavity(), many, fixtures::drive());
      const auto b = build_system(fixtures::cavity(), one, fixtures::drive());
      for (double d : spectral::uniform_grid(0.8 * kOmegaM, 1.2 * kOmegaM, 4001)) {
        worst = std::max(worst, std::abs(spectral::probe_response(a, d).eps_out_plus -
                                         spectral::probe_response(b, d).eps_out_plus));
      }
    }
    o.require(worst < 1e-12, fmt("N=2..6, max |diff|=%.2e", worst));
    return o;
  });

  criterion(7, "analytic derivative vs finite differences", 1.0, [] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pick(0.8 * kOmegaM, 1.2 * kOmegaM);
    const double h = 1e-6 * kKappa;
    double worst = 0.0;
    for (const auto& sys : {fixtures::two(), fixtures::three(), fixtures::four(), fixtures::unequal(),
                            fixtures::triple()}) {
      for (int i = 0; i < 100; ++i) {
        const double d = pick(rng);
        const cd fd = (spectral::probe_response(sys, d + h).eps_out_plus -
                       spectral::probe_response(sys, d - h).eps_out_plus) / (2.0 * h);
        const cd an = spectral::response_derivative(sys, d);
        worst = std::max(worst, std::abs(fd - an) / std::abs(an));
      }
    }
    Outcome o;
    o.require(worst < 1e-5, fmt("5 configurations x 100 points, max rel err=%.2e", worst));
    return o;
  });

  criterion(8, "harmonic-balance steady state", 10.0, [] {
    Outcome o;
    const auto two = fixtures::two();
    const auto at_w1 = dynamics::steady_state_crosscheck(two, two.membrane(0).omega);
    o.require(at_w1.relative_error_exact < 1e-6, fmt("vs exact at omega_1: %.2e", at_w1.relative_error_exact));
    double worst_exact = 0.0;
    double worst_closed = 0.0;
    std::string per_config;
    const char* names[] = {"fig2", "fig3", "fig4", "fig6", "fig7"};
    int k = 0;
    for (const auto& sys : {fixtures::two(), fixtures::three(), fixtures::four(), fixtures::unequal(),
                            fixtures::triple()}) {
      const auto c = dynamics::steady_state_crosscheck(sys, kOmegaM);
      worst_exact = std::max(worst_exact, c.relative_error_exact);
      worst_closed = std::max(worst_closed, c.relative_error);
      per_config += fmt(" %s %.3g", names[k++], c.relative_error);
    }
    o.require(worst_exact < 1e-6, fmt("vs exact at resonance, 5 configurations: %.2e", worst_exact));
    o.require(worst_closed < 0.05, "vs closed form at resonance:" + per_config);
    return o;
  });

  criterion(9, "full mean-field equations vs harmonic balance", 60.0, [] {
    Outcome o;
    const auto base = fixtures::two();
    for (double x : {1.0, 1.05}) {
      const double delta = x * kOmegaM;
      const cd hb = dynamics::steady_state_crosscheck(base, delta).eps_out_hb;
      std::vector<double> errs;
      std::string line = fmt("delta=%.2f:", x);
      bool fine = true;
      for (double r : {1e-2, 5e-3, 2.5e-3}) {
        const double eps_p = r * base.eps_L();
        const cd c = dynamics::demodulated_probe_component(base, delta, eps_p);
        const double err = std::abs(2.0 * kKappa * c / eps_p - hb) / std::abs(hb);
        fine = fine && err < 10.0 * r;
        if (!errs.empty()) fine = fine && std::log2(errs.back() / err) >= 1.0;
        errs.push_back(err);
        line += fmt(" %.1e", err);
      }
      line += fmt(" (order %.2f)", std::log2(errs[0] / errs[2]) / 2.0);
      o.require(fine, line);
    }
    return o;
  });

  criterion(10, "storage and retrieval", 60.0, [] {
    Outcome o;
    const auto sys = fixtures::storage();
    for (std::size_t n = 0; n < 2; ++n) {
      const auto p = fixtures::storage_protocol(sys, sys.membrane(n).omega);
      const auto r = dynamics::storage_retrieval(sys, p);
      const auto& ts = r.series;
      const std::size_t i0 = index_at(ts.times, p.t_wr + 3.0 * p.tau_L);
      const std::size_t i1 = index_at(ts.times, p.t_rd - 3.0 * p.tau_L);
      const double decay = std::norm(ts.states[i1].Q_plus[n]) / std::norm(ts.states[i0].Q_plus[n]);
      const double law = std::exp(-sys.membrane(n).gamma * (ts.times[i1] - ts.times[i0]));
      const double cross = max_of(ts.mech_intensity[n]) / max_of(ts.mech_intensity[1 - n]);
      o.require(std::abs(r.retrieve_peak_time - p.t_rd) <= 1.2e-3 && within(decay, law, 0.2) && cross >= 10.0,
                fmt("delta=omega_%zu: retrieve %.3f ms, decay %.4f vs %.4f, own/other %.0f", n + 1,
                    r.retrieve_peak_time * 1e3, decay, law, cross));
    }
    return o;
  });

  criterion(11, "byte-identical CSV on repeated runs", 30.0, [] {
    Outcome o;
#ifdef OPTOMECH_WITH_CLI
    int runs = 0;
    int mismatches = 0;
    for (const auto& name : cli::preset_names()) {
      const std::string preset(name);
      const bool storage = preset == "fig8" || preset == "fig9";
      const std::vector<std::string> commands =
          storage ? std::vector<std::string>{"storage"} : std::vector<std::string>{"spectrum", "groupvel", "windows"};
      for (const auto& cmd : commands) {
        std::ostringstream a, b, err;
        const int ca = cli::run({cmd, "--preset", preset}, a, err);
        const int cb = cli::run({cmd, "--preset", preset}, b, err);
        runs += 2;
        if (ca != 0 || cb != 0 || a.str() != b.str() || a.str().empty()) ++mismatches;
      }
    }
    o.require(mismatches == 0, fmt("%d runs, %d mismatched", runs, mismatches));
#else
    o.require(false, "command-line tool not built");
#endif
    return o;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
