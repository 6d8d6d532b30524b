#pragma once

// JSON-lines observation pairs and plain one-column scalar series.
//
//   {"input": {"kind": "noisy-evaluations", "points": [[0.1], ...], "values": [...]},
//    "output": {"kind": "density-sample", "points": [[0.4], ...]}}

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tribasis/basis.hpp"
#include "tribasis/errors.hpp"

namespace tribasis {

namespace io_detail {

inline bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

inline FunctionObservation observation_from_json(const nlohmann::json& j, std::size_t line, const char* role) {
  using Kind = DatasetError::Kind;
  const std::string where = std::string(role) + ": ";
  if (!j.is_object()) throw DatasetError(Kind::malformed, line, where + "expected an object");
  const std::string kind = j.value("kind", std::string(to_string(ObservationKind::noisy_evaluations)));
  const bool density = kind == to_string(ObservationKind::density_sample);
  if (!density && kind != to_string(ObservationKind::noisy_evaluations))
    throw DatasetError(Kind::malformed, line, where + "unknown kind '" + kind + "'");
  if (!j.contains("points") || !j["points"].is_array())
    throw DatasetError(Kind::malformed, line, where + "missing 'points' array");
  const auto& pts = j["points"];
  if (pts.empty()) throw DatasetError(Kind::malformed, line, where + "no points");
  const std::size_t d = pts[0].is_array() ? pts[0].size() : 0;
  if (d == 0) throw DatasetError(Kind::malformed, line, where + "points must be non-empty arrays");
  PointMatrix points(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].is_array() || pts[i].size() != d)
      throw DatasetError(Kind::dimension, line,
                         where + "point " + std::to_string(i) + " does not have " + std::to_string(d) + " coordinates");
    for (std::size_t k = 0; k < d; ++k) {
      if (!pts[i][k].is_number()) throw DatasetError(Kind::malformed, line, where + "non-numeric coordinate");
      const double x = pts[i][k].get<double>();
      if (!(x >= 0.0 && x <= 1.0))
        throw DatasetError(Kind::out_of_range, line,
                           where + "point " + std::to_string(i) + " coordinate " + std::to_string(k) +
                               " is outside [0,1]");
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = x;
    }
  }
  if (density) return FunctionObservation::density_sample(std::move(points));
  if (!j.contains("values") || !j["values"].is_array())
    throw DatasetError(Kind::malformed, line, where + "missing 'values' array");
  const auto& vals = j["values"];
  if (vals.size() != pts.size())
    throw DatasetError(Kind::malformed, line, where + "values and points differ in length");
  Eigen::VectorXd values(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (!vals[i].is_number()) throw DatasetError(Kind::malformed, line, where + "non-numeric value");
    values[static_cast<Eigen::Index>(i)] = vals[i].get<double>();
    if (!std::isfinite(values[static_cast<Eigen::Index>(i)]))
      throw DatasetError(Kind::malformed, line, where + "non-finite value");
  }
  return FunctionObservation::noisy(std::move(points), std::move(values));
}

inline nlohmann::json observation_to_json(const FunctionObservation& obs) {
  nlohmann::json j;
  j["kind"] = to_string(obs.kind());
  nlohmann::json pts = nlohmann::json::array();
  for (Eigen::Index i = 0; i < obs.size(); ++i) {
    const auto p = obs.point(i);
    pts.push_back(std::vector<double>(p.begin(), p.end()));
  }
  j["points"] = std::move(pts);
  if (obs.kind() == ObservationKind::noisy_evaluations)
    j["values"] = std::vector<double>(obs.values().data(), obs.values().data() + obs.values().size());
  return j;
}

// Parses each non-blank line and hands (json, line number) to `sink`.
template <class Sink>
void for_each_json_line(std::istream& in, Sink&& sink) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw DatasetError(DatasetError::Kind::malformed, line, std::string("invalid JSON: ") + e.what());
    }
    sink(j, line);
  }
}

inline void check_same_dimension(std::optional<int>& seen, int d, std::size_t line, const char* role) {
  if (!seen) {
    seen = d;
  } else if (*seen != d) {
    throw DatasetError(DatasetError::Kind::dimension, line,
                       std::string(role) + " dimension " + std::to_string(d) + " differs from earlier lines (" +
                           std::to_string(*seen) + ")");
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace io_detail

inline std::vector<ObservationPair> read_dataset(std::istream& in) {
  std::vector<ObservationPair> pairs;
  std::optional<int> in_dim, out_dim;
  io_detail::for_each_json_line(in, [&](const nlohmann::json& j, std::size_t line) {
    if (!j.is_object() || !j.contains("input") || !j.contains("output"))
      throw DatasetError(DatasetError::Kind::malformed, line, "expected an object with 'input' and 'output'");
    auto input = io_detail::observation_from_json(j["input"], line, "input");
    auto output = io_detail::observation_from_json(j["output"], line, "output");
    io_detail::check_same_dimension(in_dim, input.dimension(), line, "input");
    io_detail::check_same_dimension(out_dim, output.dimension(), line, "output");
    pairs.push_back({std::move(input), std::move(output)});
  });
  if (pairs.empty()) throw DatasetError(DatasetError::Kind::empty, 0, "dataset contains no pairs");
  return pairs;
}

inline std::vector<ObservationPair> read_dataset(const std::filesystem::path& path) {
  auto in = io_detail::open_input(path);
  return read_dataset(in);
}

/// Input observations only; lines may be full pairs or {"input": ...}.
inline std::vector<FunctionObservation> read_inputs(std::istream& in) {
  std::vector<FunctionObservation> out;
  std::optional<int> dim;
  io_detail::for_each_json_line(in, [&](const nlohmann::json& j, std::size_t line) {
    if (!j.is_object() || !j.contains("input"))
      throw DatasetError(DatasetError::Kind::malformed, line, "expected an object with 'input'");
    auto obs = io_detail::observation_from_json(j["input"], line, "input");
    io_detail::check_same_dimension(dim, obs.dimension(), line, "input");
    out.push_back(std::move(obs));
  });
  if (out.empty()) throw DatasetError(DatasetError::Kind::empty, 0, "file contains no input observations");
  return out;
}

inline void write_pair(std::ostream& out, const ObservationPair& pair) {
  nlohmann::json j;
  j["input"] = io_detail::observation_to_json(pair.input);
  j["output"] = io_detail::observation_to_json(pair.output);
  out << j.dump() << '\n';
}

inline void write_dataset(std::ostream& out, std::span<const ObservationPair> pairs) {
  for (const auto& p : pairs) write_pair(out, p);
  if (!out) throw std::runtime_error("write_dataset: write failed");
}

inline void write_dataset(const std::filesystem::path& path, std::span<const ObservationPair> pairs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_dataset(out, pairs);
}

/// One number per line; blank lines and lines starting with '#' are skipped.
inline std::vector<double> read_series(std::istream& in) {
  std::vector<double> values;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos || text[first] == '#') continue;
    std::istringstream fields(text);
    double v;
    std::string rest;
    if (!(fields >> v) || (fields >> rest) || !std::isfinite(v))
      throw DatasetError(DatasetError::Kind::malformed, line, "expected a single finite number");
    values.push_back(v);
  }
  if (values.empty()) throw DatasetError(DatasetError::Kind::empty, 0, "series contains no values");
  return values;
}

inline std::vector<double> read_series(const std::filesystem::path& path) {
  auto in = io_detail::open_input(path);
  return read_series(in);
}

}  // namespace tribasis
