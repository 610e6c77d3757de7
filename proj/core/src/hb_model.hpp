#pragma once

// Flat real-vector forms of the mean-field and harmonic-balance equations, as
// consumed by the ODE steppers.

#include <complex>
#include <cstddef>
#include <vector>

#include "optomech/dynamics.hpp"

namespace optomech::dynamics::detail {

using State = std::vector<double>;

inline cd load(const State& y, std::size_t i) { return {y[i], y[i + 1]}; }
inline void store(State& y, std::size_t i, cd v) {
  y[i] = v.real();
  y[i + 1] = v.imag();
}

/// Per-membrane parameters copied out of the SystemModel.
struct ModeTable {
  std::vector<double> omega;
  std::vector<double> gamma;
  std::vector<double> g;
  double kappa = 0.0;
  double bare_detuning = 0.0;

  explicit ModeTable(const SystemModel& system);
  std::size_t size() const noexcept { return omega.size(); }
};

// [c0 | c+ | c- | per n: Q0 P0 Q+ P+ | (tracked) per n: Q- P-]
struct HBLayout {
  std::size_t n = 0;
  bool track_minus = false;

  static constexpr std::size_t c0 = 0;
  static constexpr std::size_t c_plus = 2;
  static constexpr std::size_t c_minus = 4;
  std::size_t q0(std::size_t k) const { return 6 + 6 * k; }
  std::size_t p0(std::size_t k) const { return 7 + 6 * k; }
  std::size_t q_plus(std::size_t k) const { return 8 + 6 * k; }
  std::size_t p_plus(std::size_t k) const { return 10 + 6 * k; }
  std::size_t q_minus(std::size_t k) const { return 6 + 6 * n + 4 * k; }
  std::size_t p_minus(std::size_t k) const { return 8 + 6 * n + 4 * k; }
  std::size_t size() const { return 6 + 6 * n + (track_minus ? 4 * n : 0); }
  /// True for entries belonging to the first-order (sideband) block.
  bool is_sideband(std::size_t i) const {
    if (i < 6) return i >= 2;
    if (i >= 6 + 6 * n) return true;
    return (i - 6) % 6 >= 2;
  }
};

State pack(const HBState& s, const HBLayout& layout);
HBState unpack(const State& y, const HBLayout& layout);

class HarmonicBalanceSystem {
 public:
  HarmonicBalanceSystem(const SystemModel& system, DriveSchedule drive, double delta,
                        bool track_minus);

  void operator()(const State& y, State& dy, double t) const;
  const HBLayout& layout() const noexcept { return layout_; }

 private:
  ModeTable modes_;
  DriveSchedule drive_;
  double delta_;
  HBLayout layout_;
};

// [c | Q_1..Q_N | P_1..P_N]
class MeanFieldSystem {
 public:
  MeanFieldSystem(const SystemModel& system, DriveSchedule drive, double delta);

  void operator()(const State& y, State& dy, double t) const;
  std::size_t size() const { return 2 + 2 * modes_.size(); }

 private:
  ModeTable modes_;
  DriveSchedule drive_;
  double delta_;
};

State pack(const MeanFieldState& s);
MeanFieldState unpack_mean_field(const State& y, std::size_t n);

}  // namespace optomech::dynamics::detail
