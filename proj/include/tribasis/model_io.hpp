#pragma once

// Text model files. Layout is documented in docs/model_format.md.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tribasis/basis.hpp"
#include "tribasis/errors.hpp"
#include "tribasis/features.hpp"
#include "tribasis/lse.hpp"
#include "tribasis/regress.hpp"

namespace tribasis {

inline constexpr const char* kModelFormatName = "tribasis-model";
inline constexpr int kModelFormatVersion = 1;

namespace io_detail {

using nlohmann::json;

inline json index_set_to_json(const BasisIndexSet& set) {
  json j;
  j["dimension"] = set.dimension();
  j["rule"] = to_string(set.rule());
  j["radius"] = set.radius();
  if (set.sobolev_spec()) {
    const auto& spec = *set.sobolev_spec();
    j["sobolev"] = {{"nu", spec.nu}, {"gamma", spec.gamma}, {"amplitude", spec.amplitude}};
  }
  j["indices"] = set.indices();
  return j;
}

inline IndexSetPtr index_set_from_json(const json& j) {
  const int d = j.at("dimension").get<int>();
  std::optional<SobolevSpec> spec;
  if (j.contains("sobolev")) {
    const auto& s = j.at("sobolev");
    spec = SobolevSpec{s.at("nu").get<std::vector<double>>(), s.at("gamma").get<std::vector<double>>(),
                       s.at("amplitude").get<double>()};
  }
  auto indices = j.at("indices").get<std::vector<MultiIndex>>();
  for (const auto& alpha : indices)
    if (static_cast<int>(alpha.size()) != d)
      throw ModelFormatError(ModelFormatError::Kind::dimension,
                             "index of length " + std::to_string(alpha.size()) + " in a dimension-" +
                                 std::to_string(d) + " index set");
  const std::size_t listed = indices.size();
  auto set = std::make_shared<const BasisIndexSet>(d, std::move(indices),
                                                   index_rule_from_string(j.at("rule").get<std::string>()),
                                                   j.at("radius").get<double>(), std::move(spec));
  if (set->size() != listed)
    throw ModelFormatError(ModelFormatError::Kind::malformed, "index set lists duplicate indices");
  return set;
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return {{"shape", {m.rows(), m.cols()}}, {"rows", std::move(rows)}};
}

inline Eigen::MatrixXd matrix_from_json(const json& j, const std::string& name) {
  const auto shape = j.at("shape").get<std::vector<long long>>();
  if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0)
    throw ModelFormatError(ModelFormatError::Kind::malformed, name + ": shape must be [rows, cols]");
  const auto& rows = j.at("rows");
  if (!rows.is_array() || static_cast<long long>(rows.size()) != shape[0])
    throw ModelFormatError(ModelFormatError::Kind::dimension,
                           name + ": expected " + std::to_string(shape[0]) + " rows, found " +
                               std::to_string(rows.is_array() ? rows.size() : 0));
  Eigen::MatrixXd m(shape[0], shape[1]);
  for (long long i = 0; i < shape[0]; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<long long>(row.size()) != shape[1])
      throw ModelFormatError(ModelFormatError::Kind::dimension,
                             name + ": row " + std::to_string(i) + " has " +
                                 std::to_string(row.is_array() ? row.size() : 0) + " entries, expected " +
                                 std::to_string(shape[1]));
    for (long long k = 0; k < shape[1]; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

inline Eigen::VectorXd vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline json envelope(const char* type) {
  return {{"format", kModelFormatName}, {"format_version", kModelFormatVersion}, {"type", type},
          {"basis_tag", kCosineBasisTag}};
}

inline void check_dimension(bool ok, const std::string& what) {
  if (!ok) throw ModelFormatError(ModelFormatError::Kind::dimension, what);
}

inline json parse_document(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    throw ModelFormatError(ModelFormatError::Kind::truncated, "model file is empty");
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    if (e.byte >= text.size())
      throw ModelFormatError(ModelFormatError::Kind::truncated, std::string("model file ends early: ") + e.what());
    throw ModelFormatError(ModelFormatError::Kind::malformed, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kModelFormatName)
    throw ModelFormatError(ModelFormatError::Kind::malformed, "not a tribasis model file");
  if (!doc.contains("format_version") || !doc["format_version"].is_number_integer() || !doc.contains("basis_tag") ||
      !doc["basis_tag"].is_string())
    throw ModelFormatError(ModelFormatError::Kind::malformed, "model file lacks format_version or basis_tag");
  const int version = doc["format_version"].get<int>();
  if (version != kModelFormatVersion)
    throw ModelFormatError(ModelFormatError::Kind::version,
                           "model format version " + std::to_string(version) + " is not supported (this build reads version " +
                               std::to_string(kModelFormatVersion) + ")");
  const std::string basis = doc["basis_tag"].get<std::string>();
  if (basis != kCosineBasisTag)
    throw ModelFormatError(ModelFormatError::Kind::malformed, "unsupported basis family '" + basis + "'");
  return doc;
}

// Turns json access errors into malformed-file errors.
template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ModelFormatError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(ModelFormatError::Kind::malformed, std::string("model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(ModelFormatError::Kind::dimension, std::string("model file: ") + e.what());
  }
}

}  // namespace io_detail

inline nlohmann::json model_to_json(const Model3BE& model) {
  using io_detail::matrix_to_json;
  auto doc = io_detail::envelope("3be");
  const auto& map = model.feature_map;
  doc["dimensions"] = {{"l", model.input_index_set->dimension()},
                       {"k", model.output_index_set->dimension()},
                       {"s", model.input_index_set->size()},
                       {"r", model.output_index_set->size()},
                       {"D", map.feature_count()}};
  doc["input_index_set"] = io_detail::index_set_to_json(*model.input_index_set);
  doc["output_index_set"] = io_detail::index_set_to_json(*model.output_index_set);
  std::vector<double> phases(map.phases().data(), map.phases().data() + map.phases().size());
  doc["feature_map"] = {{"bandwidth", map.bandwidth()},
                        {"seed", map.seed()},
                        {"frequencies", matrix_to_json(map.frequencies())},
                        {"phases", phases}};
  doc["ridge_lambda"] = model.ridge_lambda;
  doc["psi"] = matrix_to_json(model.psi);
  doc["training_count"] = model.training_count;
  return doc;
}

inline Model3BE model_from_json(const nlohmann::json& doc) {
  return io_detail::guarded([&] {
    if (doc.at("type").get<std::string>() != "3be")
      throw ModelFormatError(ModelFormatError::Kind::malformed,
                             "expected a 3be model, found type '" + doc.at("type").get<std::string>() + "'");
    const auto& dims = doc.at("dimensions");
    const auto u = io_detail::index_set_from_json(doc.at("input_index_set"));
    const auto v = io_detail::index_set_from_json(doc.at("output_index_set"));
    const auto& fm = doc.at("feature_map");
    Eigen::MatrixXd w = io_detail::matrix_from_json(fm.at("frequencies"), "frequencies");
    Eigen::VectorXd b = io_detail::vector_from_json(fm.at("phases"));
    Eigen::MatrixXd psi = io_detail::matrix_from_json(doc.at("psi"), "psi");

    const auto s = dims.at("s").get<long long>(), r = dims.at("r").get<long long>(), d = dims.at("D").get<long long>();
    io_detail::check_dimension(dims.at("l").get<int>() == u->dimension() && dims.at("k").get<int>() == v->dimension(),
                               "declared l/k differ from the index set dimensions");
    io_detail::check_dimension(s == static_cast<long long>(u->size()), "declared s differs from |U|");
    io_detail::check_dimension(r == static_cast<long long>(v->size()), "declared r differs from |V|");
    io_detail::check_dimension(w.rows() == d && w.cols() == s, "frequencies must be D x s");
    io_detail::check_dimension(b.size() == d, "phases must have D entries");
    io_detail::check_dimension(psi.rows() == d && psi.cols() == r, "psi must be D x r");

    Model3BE model{u, v,
                   RksFeatureMap(fm.at("bandwidth").get<double>(), fm.at("seed").get<std::uint64_t>(), std::move(w),
                                 std::move(b)),
                   std::move(psi), doc.at("ridge_lambda").get<double>(), kCosineBasisTag,
                   doc.at("training_count").get<std::int64_t>()};
    model.validate();
    return model;
  });
}

inline nlohmann::json model_to_json(const LseModel& model) {
  auto doc = io_detail::envelope("lse");
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::MatrixXd inputs(n, static_cast<Eigen::Index>(model.input_index_set->size()));
  Eigen::MatrixXd outputs(n, static_cast<Eigen::Index>(model.output_index_set->size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    inputs.row(i) = model.train_inputs[i].coefficients().transpose();
    outputs.row(i) = model.train_outputs[i].coefficients().transpose();
  }
  doc["dimensions"] = {{"l", model.input_index_set->dimension()},
                       {"k", model.output_index_set->dimension()},
                       {"s", model.input_index_set->size()},
                       {"r", model.output_index_set->size()},
                       {"N", model.size()}};
  doc["input_index_set"] = io_detail::index_set_to_json(*model.input_index_set);
  doc["output_index_set"] = io_detail::index_set_to_json(*model.output_index_set);
  doc["bandwidth"] = model.bandwidth;
  doc["kernel_tag"] = model.kernel_tag;
  doc["train_inputs"] = io_detail::matrix_to_json(inputs);
  doc["train_outputs"] = io_detail::matrix_to_json(outputs);
  return doc;
}

inline LseModel lse_model_from_json(const nlohmann::json& doc) {
  return io_detail::guarded([&] {
    if (doc.at("type").get<std::string>() != "lse")
      throw ModelFormatError(ModelFormatError::Kind::malformed,
                             "expected an lse model, found type '" + doc.at("type").get<std::string>() + "'");
    const auto& dims = doc.at("dimensions");
    ProjectedDataset data{io_detail::index_set_from_json(doc.at("input_index_set")),
                          io_detail::index_set_from_json(doc.at("output_index_set")),
                          io_detail::matrix_from_json(doc.at("train_inputs"), "train_inputs"),
                          io_detail::matrix_from_json(doc.at("train_outputs"), "train_outputs")};
    const auto n = dims.at("N").get<long long>();
    io_detail::check_dimension(data.inputs.rows() == n && data.outputs.rows() == n,
                               "declared N differs from the stored training pairs");
    io_detail::check_dimension(data.inputs.cols() == static_cast<Eigen::Index>(data.input_index_set->size()),
                               "train_inputs width differs from |U|");
    io_detail::check_dimension(data.outputs.cols() == static_cast<Eigen::Index>(data.output_index_set->size()),
                               "train_outputs width differs from |V|");
    LseModel model = lse_fit_projected(data, doc.at("bandwidth").get<double>());
    model.kernel_tag = doc.at("kernel_tag").get<std::string>();
    model.validate();
    return model;
  });
}

using AnyModel = std::variant<Model3BE, LseModel>;

template <class M>
void save_model(const M& model, std::ostream& out) {
  out << model_to_json(model).dump() << '\n';
  if (!out) throw std::runtime_error("save_model: write failed");
}

template <class M>
void save_model(const M& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path.string());
  save_model(model, out);
}

inline AnyModel load_any_model(std::istream& in) {
  const auto doc = io_detail::parse_document(in);
  const auto type = io_detail::guarded([&] { return doc.at("type").get<std::string>(); });
  if (type == "3be") return model_from_json(doc);
  if (type == "lse") return lse_model_from_json(doc);
  throw ModelFormatError(ModelFormatError::Kind::malformed, "unknown model type '" + type + "'");
}

inline AnyModel load_any_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path.string());
  return load_any_model(in);
}

inline Model3BE load_model(std::istream& in) { return model_from_json(io_detail::parse_document(in)); }

inline Model3BE load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path.string());
  return load_model(in);
}

inline LseModel load_lse_model(std::istream& in) { return lse_model_from_json(io_detail::parse_document(in)); }

}  // namespace tribasis
