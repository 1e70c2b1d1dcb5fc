// Copyright 2026 The outnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scene metrics and module arbitration. At most two perception modules run,
// chosen by priority: vegetation, then unevenness, then surface properties.

#ifndef OUTNAV_SWITCHING_HPP
#define OUTNAV_SWITCHING_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "outnav/gridmap.hpp"
#include "outnav/robot.hpp"
#include "outnav/sensors.hpp"

namespace outnav {

enum class ModuleId { kTerp, kTerraPn, kProNav, kVern };

inline std::string_view to_string(ModuleId m) {
  switch (m) {
    case ModuleId::kTerp: return "Terp";
    case ModuleId::kTerraPn: return "TerraPn";
    case ModuleId::kProNav: return "ProNav";
    case ModuleId::kVern: return "Vern";
  }
  return "?";
}

inline std::optional<ModuleId> module_from_string(std::string_view s) {
  for (auto m : {ModuleId::kTerp, ModuleId::kTerraPn, ModuleId::kProNav, ModuleId::kVern}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

inline ModuleId surface_module_for(RobotKind kind) {
  return kind == RobotKind::kWheeled ? ModuleId::kTerraPn : ModuleId::kProNav;
}

struct SceneMetrics {
  double q_uneven = 0.0;
  double q_surf = 0.0;
  double q_pliable = 0.0;
  bool vertical_gradient_present = false;
  bool degenerate_elevation = false;
};

struct Thresholds {
  double tau_uneven = 0.15;
  double tau_surf = 1.0;  // replaced by calibration unless pinned in config
  double tau_pliable = 0.05;
  double tau_vertical = 20.0;  // map units per cell
  double band_lo = 40.0;
  double band_hi = 70.0;
};

/// Why a module is active: the metric that fired, or the empty-trigger fallback.
enum class Trigger { kPliable, kUneven, kSurface, kFallback };

inline std::string_view to_string(Trigger t) {
  switch (t) {
    case Trigger::kPliable: return "q_pliable";
    case Trigger::kUneven: return "q_uneven";
    case Trigger::kSurface: return "q_surf";
    case Trigger::kFallback: return "fallback";
  }
  return "?";
}

struct SwitchDecision {
  std::vector<ModuleId> active;   // priority order, size <= 2
  std::vector<Trigger> reason;    // parallel to active

  bool has(ModuleId m) const {
    return std::find(active.begin(), active.end(), m) != active.end();
  }
  friend bool operator==(const SwitchDecision&, const SwitchDecision&) = default;
};

// ─── Metrics ────────────────────────────────────────────────────────────────

/// Range of the gradient field / 100, clamped to [0,1]. Flags inputs with no
/// valid gradient cell.
inline double unevenness_metric(const ElevationMap& e, bool* degenerate = nullptr) {
  const auto range = valid_range(gradient_map(e.grid));
  if (degenerate) *degenerate = !range.has_value();
  if (!range) return 0.0;
  return std::clamp((range->max - range->min) / 100.0, 0.0, 1.0);
}

struct PcaResult {
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
};

/// Two largest eigenvalues of the population covariance of the rows.
inline PcaResult pca_top2_variances(const Eigen::MatrixXd& window) {
  const Eigen::Index m = window.rows();
  const Eigen::Index d = window.cols();
  if (d < 2 || m < d) {
    throw std::invalid_argument("pca_top2_variances: need rows >= cols >= 2");
  }
  if (!window.allFinite()) throw std::invalid_argument("pca_top2_variances: non-finite entry");
  const Eigen::RowVectorXd mean = window.colwise().mean();
  const Eigen::MatrixXd centered = window.rowwise() - mean;
  if (centered.isZero(0.0)) return {};
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();  // ascending
  return {std::max(0.0, ev(d - 1)), std::max(0.0, ev(d - 2))};
}

inline double surface_metric(const Eigen::MatrixXd& window) {
  const PcaResult p = pca_top2_variances(window);
  return std::sqrt(p.sigma1_sq + p.sigma2_sq);
}

inline double surface_metric(const SensorWindow& window) {
  if (window.rows() < window.columns()) return 0.0;
  return surface_metric(window.matrix());
}

struct PliabilityResult {
  double q_pliable = 0.0;
  bool vertical_gradient_present = false;
};

/// Band fraction of the intensity map plus the vertical-structure check on the
/// (all-returns) elevation map.
inline PliabilityResult pliability_metric(const IntensityMap& d, const ElevationMap& e,
                                          const Thresholds& t = {}) {
  PliabilityResult out;
  out.q_pliable = value_histogram_fraction(d, t.band_lo, t.band_hi);
  const auto range = valid_range(gradient_map(e.grid));
  out.vertical_gradient_present = range && range->max >= t.tau_vertical;
  return out;
}

// ─── Arbitration ────────────────────────────────────────────────────────────

struct TriggerFlags {
  bool pliable = false;
  bool uneven = false;
  bool surface = false;
  friend bool operator==(TriggerFlags, TriggerFlags) = default;
};

inline TriggerFlags evaluate_triggers(const SceneMetrics& m, const Thresholds& t) {
  return {m.q_pliable > t.tau_pliable && m.vertical_gradient_present,
          m.q_uneven > t.tau_uneven, m.q_surf > t.tau_surf};
}

inline SwitchDecision select_modules(const TriggerFlags& f, RobotKind kind) {
  SwitchDecision d;
  const auto add = [&](ModuleId m, Trigger why) {
    if (d.active.size() < 2) {
      d.active.push_back(m);
      d.reason.push_back(why);
    }
  };
  if (f.pliable) add(ModuleId::kVern, Trigger::kPliable);
  if (f.uneven) add(ModuleId::kTerp, Trigger::kUneven);
  if (f.surface) add(surface_module_for(kind), Trigger::kSurface);
  if (d.active.empty()) add(surface_module_for(kind), Trigger::kFallback);
  return d;
}

inline SwitchDecision select_modules(const SceneMetrics& m, const Thresholds& t,
                                     RobotKind kind) {
  for (double v : {m.q_uneven, m.q_surf, m.q_pliable}) {
    if (!std::isfinite(v)) throw std::invalid_argument("select_modules: non-finite metric");
  }
  return select_modules(evaluate_triggers(m, t), kind);
}

/// Debounces each trigger: a flag flips only after `ticks` consecutive
/// evaluations disagree with the held value. The first evaluation is taken
/// as-is.
class TriggerHysteresis {
 public:
  explicit TriggerHysteresis(int ticks = 3) : ticks_(ticks) {
    if (ticks < 1) throw std::invalid_argument("TriggerHysteresis: ticks must be >= 1");
  }

  TriggerFlags update(const TriggerFlags& raw) {
    const std::array<bool, 3> in = {raw.pliable, raw.uneven, raw.surface};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!initialized_) {
        held_[i] = in[i];
        streak_[i] = 0;
      } else if (in[i] != held_[i]) {
        if (++streak_[i] >= ticks_) {
          held_[i] = in[i];
          streak_[i] = 0;
        }
      } else {
        streak_[i] = 0;
      }
    }
    initialized_ = true;
    return held();
  }

  TriggerFlags held() const { return {held_[0], held_[1], held_[2]}; }

 private:
  int ticks_;
  bool initialized_ = false;
  std::array<bool, 3> held_{};
  std::array<int, 3> streak_{};
};

}  // namespace outnav

#endif  // OUTNAV_SWITCHING_HPP
