#pragma once

// Turns scalar time series into fixed-grid observation pairs.

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tribasis/basis.hpp"

namespace tribasis {

enum class WindowMode { forward, co_occurring };

inline const char* to_string(WindowMode mode) {
  return mode == WindowMode::forward ? "forward" : "co-occurring";
}

inline WindowMode window_mode_from_string(const std::string& s) {
  if (s == "forward") return WindowMode::forward;
  if (s == "co-occurring") return WindowMode::co_occurring;
  throw std::invalid_argument("unknown window mode '" + s + "' (expected forward or co-occurring)");
}

struct SeriesWindowing {
  int window_length = 64;
  WindowMode mode = WindowMode::forward;
  int stride = 64;

  void validate() const {
    if (window_length < 2) throw std::invalid_argument("SeriesWindowing: window_length must be >= 2");
    if (stride < 1) throw std::invalid_argument("SeriesWindowing: stride must be >= 1");
  }
};

/// u = (v - offset) / scale maps the series into [0,1].
struct AffineTransform {
  double offset = 0.0;
  double scale = 1.0;

  double apply(double v) const { return (v - offset) / scale; }
  double invert(double u) const { return u * scale + offset; }

  /// min/max rescaling; a constant series maps to 0.
  static AffineTransform fit(std::span<const double> values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double range = *hi - *lo;
    return {*lo, range > 0.0 ? range : 1.0};
  }
};

struct WindowedSeries {
  std::vector<ObservationPair> pairs;
  AffineTransform input_transform;
  AffineTransform output_transform;
};

/// Grid points (j + 0.5) / w, j = 0..w-1.
inline PointMatrix window_grid(int w) {
  PointMatrix p(w, 1);
  for (int j = 0; j < w; ++j) p(j, 0) = (j + 0.5) / w;
  return p;
}

namespace detail {

inline FunctionObservation window_observation(std::span<const double> values, std::size_t start, int w,
                                              const AffineTransform& t, const PointMatrix& grid) {
  Eigen::VectorXd v(w);
  for (int j = 0; j < w; ++j) v[j] = t.apply(values[start + static_cast<std::size_t>(j)]);
  return FunctionObservation::noisy(grid, std::move(v));
}

}  // namespace detail

/// Forward mode: window starting at i*stride predicts the window right after
/// it. Yields floor((L - 2w) / stride) + 1 pairs.
inline WindowedSeries window_series(std::span<const double> values, const SeriesWindowing& windowing) {
  windowing.validate();
  if (windowing.mode != WindowMode::forward)
    throw std::invalid_argument("window_series: co-occurring mode needs a companion output series");
  const std::size_t w = static_cast<std::size_t>(windowing.window_length);
  if (values.size() < 2 * w)
    throw std::invalid_argument("window_series: series of length " + std::to_string(values.size()) +
                                " is shorter than 2w = " + std::to_string(2 * w));
  WindowedSeries out;
  out.input_transform = out.output_transform = AffineTransform::fit(values);
  const PointMatrix grid = window_grid(windowing.window_length);
  const std::size_t count = (values.size() - 2 * w) / static_cast<std::size_t>(windowing.stride) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * static_cast<std::size_t>(windowing.stride);
    out.pairs.push_back({detail::window_observation(values, start, windowing.window_length, out.input_transform, grid),
                         detail::window_observation(values, start + w, windowing.window_length,
                                                    out.output_transform, grid)});
  }
  return out;
}

/// Co-occurring mode: the same time span of `inputs` predicts `outputs`.
/// Each series gets its own rescaling. Yields floor((L - w) / stride) + 1 pairs.
inline WindowedSeries window_series(std::span<const double> inputs, std::span<const double> outputs,
                                    const SeriesWindowing& windowing) {
  windowing.validate();
  if (windowing.mode != WindowMode::co_occurring)
    throw std::invalid_argument("window_series: two series given but mode is forward");
  if (inputs.size() != outputs.size())
    throw std::invalid_argument("window_series: input and output series differ in length");
  const std::size_t w = static_cast<std::size_t>(windowing.window_length);
  if (inputs.size() < w)
    throw std::invalid_argument("window_series: series of length " + std::to_string(inputs.size()) +
                                " is shorter than w = " + std::to_string(w));
  WindowedSeries out;
  out.input_transform = AffineTransform::fit(inputs);
  out.output_transform = AffineTransform::fit(outputs);
  const PointMatrix grid = window_grid(windowing.window_length);
  const std::size_t count = (inputs.size() - w) / static_cast<std::size_t>(windowing.stride) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * static_cast<std::size_t>(windowing.stride);
    out.pairs.push_back(
        {detail::window_observation(inputs, start, windowing.window_length, out.input_transform, grid),
         detail::window_observation(outputs, start, windowing.window_length, out.output_transform, grid)});
  }
  return out;
}

}  // namespace tribasis
