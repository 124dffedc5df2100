#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace disped {

/// Load value with its first two time derivatives at a sample instant.
struct LoadSample {
  double p = 0.0;
  double dp = 0.0;
  double ddp = 0.0;
};

/// Total-load trajectory P_l(t). Piecewise-constant and table signals have
/// derivative jumps; their derivative bounds are reported as unavailable.
class LoadSignal {
 public:
  struct Burst {
    double t0 = 0.0;
    double duration = 0.0;
    double amp = 0.0;
    double omega = 0.0;
    double decay = 0.0;  // envelope amp * exp(-decay (t - t0))
  };

  static LoadSignal constant(double value);
  /// steps: (t_from, value), first t_from must be 0, strictly increasing.
  static LoadSignal piecewise_constant(std::vector<std::pair<double, double>> steps);
  static LoadSignal sinusoid(double base, double amp, double omega);
  static LoadSignal decaying_bursts(double base, std::vector<Burst> bursts);
  /// samples: (t, value) linearly interpolated, clamped outside the range.
  static LoadSignal table(std::vector<std::pair<double, double>> samples);

  LoadSample at(double t) const;

  /// (d1, d2) with |dP_l| <= d1, |ddP_l| <= d2 when the signal is smooth
  /// enough for the bounds to mean anything.
  std::optional<std::pair<double, double>> derivative_bounds() const;

  /// Maximal intervals inside [0, T] on which the signal is constant.
  std::vector<std::pair<double, double>> constant_intervals(double T) const;

  /// Times in (0, T) where the value or slope breaks (integration grid splits).
  std::vector<double> grid_splits(double T) const;

  enum class Kind { Constant, Piecewise, Sinusoid, Bursts, Table };
  Kind kind() const { return kind_; }

  friend nlohmann::json load_signal_to_json(const LoadSignal& s);

 private:
  Kind kind_ = Kind::Constant;
  double base_ = 0.0;
  double amp_ = 0.0;
  double omega_ = 0.0;
  std::vector<std::pair<double, double>> points_;  // steps or table samples
  std::vector<Burst> bursts_;
};

LoadSignal load_signal_from_json(const nlohmann::json& j);
nlohmann::json load_signal_to_json(const LoadSignal& s);

}  // namespace disped
