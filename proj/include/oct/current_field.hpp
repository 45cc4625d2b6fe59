#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "oct/errors.hpp"
#include "oct/format.hpp"
#include "oct/random.hpp"

namespace oct {

/// Flow speed v(z, t) sampled on a depth x time grid. Depths in m (ascending),
/// time stamps in hours (ascending, uniformly spaced), speeds in m/s stored
/// row-major as [time][depth].
class CurrentField {
 public:
  CurrentField(std::vector<double> depth_bins, std::vector<double> time_stamps,
               std::vector<double> speeds)
      : depths_(std::move(depth_bins)), times_(std::move(time_stamps)), speeds_(std::move(speeds)) {
    if (depths_.size() < 2) throw InputError("current field needs at least two depth bins");
    if (times_.size() < 2) throw InputError("current field needs at least two time stamps");
    if (speeds_.size() != depths_.size() * times_.size()) {
      throw InputError("current field speed matrix has " + std::to_string(speeds_.size()) +
                       " entries, expected " + std::to_string(depths_.size() * times_.size()));
    }
    for (std::size_t i = 0; i < depths_.size(); ++i) {
      if (!std::isfinite(depths_[i]) || (i > 0 && !(depths_[i] > depths_[i - 1]))) {
        throw InputError("depth bins must be finite and strictly ascending (bin " +
                         std::to_string(i) + ")");
      }
    }
    const double spacing = times_[1] - times_[0];
    for (std::size_t k = 0; k < times_.size(); ++k) {
      if (!std::isfinite(times_[k]) || (k > 0 && !(times_[k] > times_[k - 1]))) {
        throw InputError("time stamps must be finite and strictly ascending (row " +
                         std::to_string(k) + ")");
      }
      const double expected = times_[0] + spacing * static_cast<double>(k);
      if (std::abs(times_[k] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
        throw InputError("time stamps must be uniformly spaced (row " + std::to_string(k) + ")");
      }
    }
    for (std::size_t n = 0; n < speeds_.size(); ++n) {
      if (!std::isfinite(speeds_[n]) || speeds_[n] < 0.0) {
        throw InputError("speeds must be finite and >= 0 (time row " +
                         std::to_string(n / depths_.size()) + ", depth column " +
                         std::to_string(n % depths_.size()) + ")");
      }
    }
    time_step_ = spacing;
  }

  const std::vector<double>& depth_bins() const { return depths_; }
  const std::vector<double>& time_stamps() const { return times_; }
  const std::vector<double>& speeds() const { return speeds_; }
  double time_step() const { return time_step_; }

  double node(std::size_t time_index, std::size_t depth_index) const {
    return speeds_[time_index * depths_.size() + depth_index];
  }

  bool covers_depth(double z) const { return z >= depths_.front() && z <= depths_.back(); }
  bool covers_time(double t) const { return t >= times_.front() && t <= times_.back(); }

  bool operator==(const CurrentField&) const = default;

 private:
  std::vector<double> depths_;
  std::vector<double> times_;
  std::vector<double> speeds_;
  double time_step_ = 0.0;
};

namespace detail {

// Cell index and weight of x inside ascending knots; exact at knots.
inline std::pair<std::size_t, double> locate(const std::vector<double>& knots, double x) {
  auto it = std::upper_bound(knots.begin(), knots.end(), x);
  std::size_t i = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
  if (i >= knots.size() - 1) i = knots.size() - 2;
  return {i, (x - knots[i]) / (knots[i + 1] - knots[i])};
}

}  // namespace detail

/// Bilinear interpolation of the flow speed at depth z (m) and time t (h).
inline double speed_at(const CurrentField& field, double z, double t) {
  if (!field.covers_depth(z) || !field.covers_time(t)) {
    throw InputError("current field query (z=" + format_double(z) + " m, t=" + format_double(t) +
                     " h) lies outside its coverage");
  }
  const auto [i, a] = detail::locate(field.depth_bins(), z);
  const auto [k, b] = detail::locate(field.time_stamps(), t);
  const double v0 = (1.0 - a) * field.node(k, i) + a * field.node(k, i + 1);
  const double v1 = (1.0 - a) * field.node(k + 1, i) + a * field.node(k + 1, i + 1);
  return (1.0 - b) * v0 + b * v1;
}

/// Parameters of the synthetic surface-intensified current.
///
///   surface(t) = max(0, mean + amplitude * sin(2 pi t / period) + n(t))
///   shear(z)   = min(1, exp(-(z - reference_depth) / decay_length))
///   v(z, t)    = surface(t) * shear(z)
///
/// n(t) is a stationary AR(1) sequence with standard deviation noise_stddev
/// and lag-one correlation noise_correlation, one draw per time stamp.
struct SynthesisSpec {
  double mean = 0.67;              // m/s
  double amplitude = 0.25;         // m/s
  double period = 48.0;            // h
  double noise_stddev = 0.05;      // m/s
  double noise_correlation = 0.7;  // lag-one
  double decay_length = 120.0;     // m
  double reference_depth = 50.0;   // m, shallowest depth of full-strength flow
  double depth_step = 5.0;         // m
  double depth_extent = 400.0;     // m
  double time_step = 1.0;          // h
  double duration = 720.0;         // h
};

inline void validate(const SynthesisSpec& s) {
  auto bad = [](const char* what) { throw InputError(std::string("invalid synthesis spec: ") + what); };
  if (!(std::isfinite(s.mean) && s.mean >= 0.0)) bad("mean must be >= 0");
  if (!(std::isfinite(s.amplitude) && s.amplitude >= 0.0)) bad("amplitude must be >= 0");
  if (!(std::isfinite(s.period) && s.period > 0.0)) bad("period must be > 0");
  if (!(std::isfinite(s.noise_stddev) && s.noise_stddev >= 0.0)) bad("noise_stddev must be >= 0");
  if (!(s.noise_correlation >= 0.0 && s.noise_correlation < 1.0)) {
    bad("noise_correlation must lie in [0, 1)");
  }
  if (!(std::isfinite(s.decay_length) && s.decay_length > 0.0)) bad("decay_length must be > 0");
  if (!std::isfinite(s.reference_depth)) bad("reference_depth must be finite");
  if (!(std::isfinite(s.depth_step) && s.depth_step > 0.0)) bad("depth_step must be > 0");
  if (!(std::isfinite(s.depth_extent) && s.depth_extent >= s.depth_step)) {
    bad("depth_extent must be >= depth_step");
  }
  if (!(std::isfinite(s.time_step) && s.time_step > 0.0)) bad("time_step must be > 0");
  if (!(std::isfinite(s.duration) && s.duration >= s.time_step)) bad("duration must be >= time_step");
}

/// Deterministic synthetic field; depth bins 0, step, ..., extent and hourly
/// (by default) stamps from t = 0.
inline CurrentField synthesize(std::uint64_t seed, const SynthesisSpec& spec = {}) {
  validate(spec);
  const auto n_depth = static_cast<std::size_t>(std::floor(spec.depth_extent / spec.depth_step + 1e-9)) + 1;
  const auto n_time = static_cast<std::size_t>(std::floor(spec.duration / spec.time_step + 1e-9)) + 1;

  std::vector<double> depths(n_depth);
  for (std::size_t i = 0; i < n_depth; ++i) depths[i] = spec.depth_step * static_cast<double>(i);
  std::vector<double> times(n_time);
  for (std::size_t k = 0; k < n_time; ++k) times[k] = spec.time_step * static_cast<double>(k);

  std::vector<double> shear(n_depth);
  for (std::size_t i = 0; i < n_depth; ++i) {
    shear[i] = std::min(1.0, std::exp(-(depths[i] - spec.reference_depth) / spec.decay_length));
  }

  Rng rng(seed);
  const double rho = spec.noise_correlation;
  const double innovation = spec.noise_stddev * std::sqrt(1.0 - rho * rho);
  double noise = spec.noise_stddev * rng.normal();

  std::vector<double> speeds(n_depth * n_time);
  for (std::size_t k = 0; k < n_time; ++k) {
    if (k > 0) noise = rho * noise + innovation * rng.normal();
    const double phase = 2.0 * std::numbers::pi * times[k] / spec.period;
    const double surface = std::max(0.0, spec.mean + spec.amplitude * std::sin(phase) + noise);
    for (std::size_t i = 0; i < n_depth; ++i) speeds[k * n_depth + i] = surface * shear[i];
  }
  return CurrentField(std::move(depths), std::move(times), std::move(speeds));
}

/// Uniform field: every node equals `speed`.
inline CurrentField constant_field(double speed, std::vector<double> depths, std::vector<double> times) {
  std::vector<double> speeds(depths.size() * times.size(), speed);
  return CurrentField(std::move(depths), std::move(times), std::move(speeds));
}

/// CSV layout: header `time_h,<depth_1>,<depth_2>,...`, then one row per time
/// stamp holding the stamp followed by the speed at every depth.
inline std::string to_csv(const CurrentField& field) {
  std::string out = "time_h";
  for (double z : field.depth_bins()) {
    out += ',';
    out += format_double(z);
  }
  out += '\n';
  const auto& times = field.time_stamps();
  for (std::size_t k = 0; k < times.size(); ++k) {
    out += format_double(times[k]);
    for (std::size_t i = 0; i < field.depth_bins().size(); ++i) {
      out += ',';
      out += format_double(field.node(k, i));
    }
    out += '\n';
  }
  return out;
}

inline CurrentField parse_csv(std::string_view text, std::string_view source = "<csv>") {
  std::vector<double> depths;
  std::vector<double> times;
  std::vector<double> speeds;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_done = false;
  while (pos < text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;

    const auto where = [&] { return std::string(source) + ":" + std::to_string(line_no) + ": "; };
    std::vector<std::string_view> cells;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }

    if (!header_done) {
      if (cells.front() != "time_h") throw InputError(where() + "header must start with 'time_h'");
      for (std::size_t c = 1; c < cells.size(); ++c) {
        double z = 0.0;
        if (!try_parse_double(cells[c], z)) {
          throw InputError(where() + "malformed depth '" + std::string(cells[c]) + "'");
        }
        if (!depths.empty() && !(z > depths.back())) {
          throw InputError(where() + "depth header must be strictly ascending");
        }
        depths.push_back(z);
      }
      header_done = true;
      continue;
    }

    if (cells.size() != depths.size() + 1) {
      throw InputError(where() + "row has " + std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(depths.size() + 1));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double x = 0.0;
      if (!try_parse_double(cells[c], x)) {
        throw InputError(where() + "malformed number '" + std::string(cells[c]) + "'");
      }
      if (c == 0) {
        if (!times.empty() && !(x > times.back())) {
          throw InputError(where() + "time stamps must be strictly ascending");
        }
        times.push_back(x);
      } else {
        if (x < 0.0) throw InputError(where() + "negative speed");
        speeds.push_back(x);
      }
    }
  }
  if (!header_done) throw InputError(std::string(source) + ": empty current file");
  return CurrentField(std::move(depths), std::move(times), std::move(speeds));
}

inline CurrentField load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open current file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path);
}

inline void save_csv(const CurrentField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write current file '" + path + "'");
  out << to_csv(field);
  if (!out) throw InputError("failed writing current file '" + path + "'");
}

}  // namespace oct
