#include "disped/load_signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace disped {

LoadSignal LoadSignal::constant(double value) {
  LoadSignal s;
  s.kind_ = Kind::Constant;
  s.base_ = value;
  return s;
}

LoadSignal LoadSignal::piecewise_constant(std::vector<std::pair<double, double>> steps) {
  if (steps.empty()) throw std::invalid_argument("load: piecewise signal needs steps");
  if (steps.front().first != 0.0)
    throw std::invalid_argument("load: first piecewise step must start at t = 0");
  for (size_t k = 1; k < steps.size(); ++k)
    if (steps[k].first <= steps[k - 1].first)
      throw std::invalid_argument("load: piecewise step times must be strictly increasing");
  LoadSignal s;
  s.kind_ = Kind::Piecewise;
  s.points_ = std::move(steps);
  return s;
}

LoadSignal LoadSignal::sinusoid(double base, double amp, double omega) {
  LoadSignal s;
  s.kind_ = Kind::Sinusoid;
  s.base_ = base;
  s.amp_ = amp;
  s.omega_ = omega;
  return s;
}

LoadSignal LoadSignal::decaying_bursts(double base, std::vector<Burst> bursts) {
  for (const Burst& b : bursts)
    if (b.duration <= 0.0) throw std::invalid_argument("load: burst duration must be > 0");
  std::sort(bursts.begin(), bursts.end(),
            [](const Burst& a, const Burst& b) { return a.t0 < b.t0; });
  LoadSignal s;
  s.kind_ = Kind::Bursts;
  s.base_ = base;
  s.bursts_ = std::move(bursts);
  return s;
}

LoadSignal LoadSignal::table(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw std::invalid_argument("load: table needs at least two samples");
  for (size_t k = 1; k < samples.size(); ++k)
    if (samples[k].first <= samples[k - 1].first)
      throw std::invalid_argument("load: table times must be strictly increasing");
  LoadSignal s;
  s.kind_ = Kind::Table;
  s.points_ = std::move(samples);
  return s;
}

LoadSample LoadSignal::at(double t) const {
  switch (kind_) {
    case Kind::Constant:
      return {base_, 0.0, 0.0};
    case Kind::Piecewise: {
      auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                 [](double v, const auto& p) { return v < p.first; });
      return {std::prev(it)->second, 0.0, 0.0};
    }
    case Kind::Sinusoid: {
      const double w = omega_;
      return {base_ + amp_ * std::sin(w * t), amp_ * w * std::cos(w * t),
              -amp_ * w * w * std::sin(w * t)};
    }
    case Kind::Bursts: {
      LoadSample s{base_, 0.0, 0.0};
      for (const Burst& b : bursts_) {
        const double tau = t - b.t0;
        if (tau < 0.0 || tau >= b.duration) continue;
        const double env = b.amp * std::exp(-b.decay * tau);
        const double sn = std::sin(b.omega * tau);
        const double cs = std::cos(b.omega * tau);
        s.p += env * sn;
        s.dp += env * (b.omega * cs - b.decay * sn);
        s.ddp += env * ((b.decay * b.decay - b.omega * b.omega) * sn -
                        2.0 * b.decay * b.omega * cs);
      }
      return s;
    }
    case Kind::Table: {
      if (t <= points_.front().first) return {points_.front().second, 0.0, 0.0};
      if (t >= points_.back().first) return {points_.back().second, 0.0, 0.0};
      auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                 [](double v, const auto& p) { return v < p.first; });
      const auto& hi = *it;
      const auto& lo = *std::prev(it);
      const double slope = (hi.second - lo.second) / (hi.first - lo.first);
      return {lo.second + slope * (t - lo.first), slope, 0.0};
    }
  }
  throw std::logic_error("load: unknown kind");
}

std::optional<std::pair<double, double>> LoadSignal::derivative_bounds() const {
  switch (kind_) {
    case Kind::Constant:
      return std::make_pair(0.0, 0.0);
    case Kind::Sinusoid:
      return std::make_pair(std::abs(amp_ * omega_), std::abs(amp_ * omega_ * omega_));
    case Kind::Bursts: {
      // Per-burst essential sups; summed so overlapping windows stay covered.
      double d1 = 0.0, d2 = 0.0;
      for (const Burst& b : bursts_) {
        const double a = std::abs(b.amp);
        d1 += a * std::hypot(b.omega, b.decay);
        d2 += a * (b.omega * b.omega + b.decay * b.decay);
      }
      return std::make_pair(d1, d2);
    }
    case Kind::Piecewise:
    case Kind::Table:
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<std::pair<double, double>> LoadSignal::constant_intervals(double T) const {
  std::vector<std::pair<double, double>> out;
  switch (kind_) {
    case Kind::Constant:
      out.push_back({0.0, T});
      break;
    case Kind::Piecewise:
      for (size_t k = 0; k < points_.size(); ++k) {
        const double t0 = points_[k].first;
        const double t1 = k + 1 < points_.size() ? std::min(points_[k + 1].first, T) : T;
        if (t0 < t1) out.push_back({t0, t1});
        if (t1 >= T) break;
      }
      break;
    case Kind::Sinusoid:
      if (amp_ == 0.0) out.push_back({0.0, T});
      break;
    case Kind::Bursts: {
      double cursor = 0.0;
      for (const Burst& b : bursts_) {
        if (b.t0 >= T) break;
        if (b.t0 > cursor) out.push_back({cursor, std::min(b.t0, T)});
        cursor = std::max(cursor, b.t0 + b.duration);
      }
      if (cursor < T) out.push_back({cursor, T});
      break;
    }
    case Kind::Table:
      break;
  }
  return out;
}

std::vector<double> LoadSignal::grid_splits(double T) const {
  std::vector<double> out;
  auto push = [&](double t) {
    if (t > 0.0 && t < T) out.push_back(t);
  };
  switch (kind_) {
    case Kind::Constant:
    case Kind::Sinusoid:
      break;
    case Kind::Piecewise:
      for (size_t k = 1; k < points_.size(); ++k) push(points_[k].first);
      break;
    case Kind::Bursts:
      for (const Burst& b : bursts_) {
        push(b.t0);
        push(b.t0 + b.duration);
      }
      break;
    case Kind::Table:
      for (const auto& p : points_) push(p.first);
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LoadSignal load_signal_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return LoadSignal::constant(j.at("value").get<double>());
  if (kind == "piecewise_constant") {
    std::vector<std::pair<double, double>> steps;
    for (const auto& p : j.at("points")) steps.push_back({p[0].get<double>(), p[1].get<double>()});
    return LoadSignal::piecewise_constant(std::move(steps));
  }
  if (kind == "sinusoid")
    return LoadSignal::sinusoid(j.at("base").get<double>(), j.at("amp").get<double>(),
                                j.at("omega").get<double>());
  if (kind == "decaying_bursts") {
    std::vector<LoadSignal::Burst> bursts;
    for (const auto& b : j.at("bursts"))
      bursts.push_back({b.at("t0").get<double>(), b.at("duration").get<double>(),
                        b.at("amp").get<double>(), b.at("omega").get<double>(),
                        b.at("decay").get<double>()});
    return LoadSignal::decaying_bursts(j.at("base").get<double>(), std::move(bursts));
  }
  if (kind == "table") {
    std::vector<std::pair<double, double>> samples;
    for (const auto& p : j.at("samples"))
      samples.push_back({p[0].get<double>(), p[1].get<double>()});
    return LoadSignal::table(std::move(samples));
  }
  throw std::invalid_argument("load: unknown kind '" + kind + "'");
}

nlohmann::json load_signal_to_json(const LoadSignal& s) {
  nlohmann::json j;
  switch (s.kind_) {
    case LoadSignal::Kind::Constant:
      j = {{"kind", "constant"}, {"value", s.base_}};
      break;
    case LoadSignal::Kind::Piecewise: {
      j["kind"] = "piecewise_constant";
      auto& pts = j["points"] = nlohmann::json::array();
      for (const auto& p : s.points_) pts.push_back({p.first, p.second});
      break;
    }
    case LoadSignal::Kind::Sinusoid:
      j = {{"kind", "sinusoid"}, {"base", s.base_}, {"amp", s.amp_}, {"omega", s.omega_}};
      break;
    case LoadSignal::Kind::Bursts: {
      j["kind"] = "decaying_bursts";
      j["base"] = s.base_;
      auto& bs = j["bursts"] = nlohmann::json::array();
      for (const auto& b : s.bursts_)
        bs.push_back({{"t0", b.t0},
                      {"duration", b.duration},
                      {"amp", b.amp},
                      {"omega", b.omega},
                      {"decay", b.decay}});
      break;
    }
    case LoadSignal::Kind::Table: {
      j["kind"] = "table";
      auto& pts = j["samples"] = nlohmann::json::array();
      for (const auto& p : s.points_) pts.push_back({p.first, p.second});
      break;
    }
  }
  return j;
}

}  // namespace disped
