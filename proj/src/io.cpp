#include "fwbt/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fwbt::io {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Empty arrays carry no column count, so the caller supplies it.
Matrix matrix_from_json(const json& j, const char* name, std::optional<Eigen::Index> cols_hint = std::nullopt) {
  if (!j.is_array()) throw FormatError(std::string("matrix '") + name + "' must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = cols_hint.value_or(0);
  if (rows > 0) {
    if (!j[0].is_array()) throw FormatError(std::string("matrix '") + name + "' must be an array of rows");
    cols = static_cast<Eigen::Index>(j[0].size());
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw FormatError(std::string("matrix '") + name + "' has ragged rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw FormatError(std::string("matrix '") + name + "' has a non-numeric entry");
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

json model_json(const StateSpaceModel& model) {
  json j;
  if (model.domain().is_discrete()) {
    j["domain"] = "dt";
    j["dt"] = model.domain().sample_time();
  } else {
    j["domain"] = "ct";
  }
  j["A"] = matrix_to_json(model.a());
  j["B"] = matrix_to_json(model.b());
  j["C"] = matrix_to_json(model.c());
  j["D"] = matrix_to_json(model.d());
  return j;
}

StateSpaceModel model_from(const json& j) {
  if (!j.is_object()) throw FormatError("model must be a JSON object");
  for (const char* key : {"domain", "A", "B", "C", "D"}) {
    if (!j.contains(key)) throw FormatError(std::string("model is missing '") + key + "'");
  }
  const std::string domain = j["domain"].get<std::string>();
  TimeDomain td = TimeDomain::continuous();
  if (domain == "dt") {
    if (!j.contains("dt") || !j["dt"].is_number()) throw FormatError("discrete model needs a numeric 'dt'");
    td = TimeDomain::discrete(j["dt"].get<double>());
  } else if (domain != "ct") {
    throw FormatError("domain must be \"ct\" or \"dt\", got \"" + domain + "\"");
  }
  Matrix d = matrix_from_json(j["D"], "D");
  Matrix a = matrix_from_json(j["A"], "A");
  Matrix b = matrix_from_json(j["B"], "B", d.cols());
  Matrix c = matrix_from_json(j["C"], "C", a.cols());
  if (a.rows() == 0) {
    // Zero-state models: B is n x m and C is p x n with n = 0.
    b.resize(0, d.cols());
    c.resize(d.rows(), 0);
  }
  return StateSpaceModel(std::move(a), std::move(b), std::move(c), std::move(d), td);
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string model_to_json(const StateSpaceModel& model, int indent) { return model_json(model).dump(indent); }

StateSpaceModel model_from_json(const std::string& text) {
  try {
    return model_from(parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model: ") + e.what());
  }
}

std::string weighted_to_json(const WeightedModel& model, int indent) {
  json j;
  j["plant"] = model_json(model.plant);
  if (model.input_weight) j["input_weight"] = model_json(*model.input_weight);
  if (model.output_weight) j["output_weight"] = model_json(*model.output_weight);
  return j.dump(indent);
}

WeightedModel weighted_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    if (!j.contains("plant")) return WeightedModel{model_from(j), std::nullopt, std::nullopt};
    WeightedModel out{model_from(j["plant"]), std::nullopt, std::nullopt};
    if (j.contains("input_weight") && !j["input_weight"].is_null()) out.input_weight = model_from(j["input_weight"]);
    if (j.contains("output_weight") && !j["output_weight"].is_null()) {
      out.output_weight = model_from(j["output_weight"]);
    }
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model: ") + e.what());
  }
}

std::string report_to_json(const ReductionReport& report, int indent) {
  json j;
  j["method"] = to_string(report.method);
  if (report.t) j["t"] = *report.t;
  j["sigma"] = vector_json(report.sigma);
  json table = json::array();
  for (const auto& [r, model] : report.reduced) {
    json row;
    row["r"] = r;
    if (auto it = report.bound.find(r); it != report.bound.end()) row["bound"] = it->second;
    if (auto it = report.measured_error.find(r); it != report.measured_error.end()) row["error"] = it->second;
    row["model"] = model_json(model);
    table.push_back(std::move(row));
  }
  j["orders"] = std::move(table);
  json iters = json::array();
  for (const auto& it : report.iterations) {
    iters.push_back({{"index", it.index},
                     {"step", it.step},
                     {"sigma_sum", it.sigma_sum},
                     {"nuclear_norm", it.nuclear_norm},
                     {"solve_time", it.solve_time},
                     {"solver_iterations", it.solver_iterations}});
  }
  j["iterations"] = std::move(iters);
  j["warnings"] = report.warnings;
  j["degraded"] = report.degraded;
  j["total_solve_time"] = report.total_solve_time;
  j["balanced"] = model_json(report.balanced);
  return j.dump(indent);
}

ReductionReport report_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    ReductionReport rep;
    const auto method = parse_method(j.at("method").get<std::string>());
    if (!method) throw FormatError("unknown method '" + j.at("method").get<std::string>() + "'");
    rep.method = *method;
    if (j.contains("t")) rep.t = j["t"].get<double>();
    const auto& sig = j.at("sigma");
    rep.sigma.resize(static_cast<Eigen::Index>(sig.size()));
    for (std::size_t i = 0; i < sig.size(); ++i) rep.sigma(static_cast<Eigen::Index>(i)) = sig[i].get<double>();
    for (const auto& row : j.at("orders")) {
      const int r = row.at("r").get<int>();
      rep.reduced.emplace(r, model_from(row.at("model")));
      if (row.contains("bound")) rep.bound[r] = row["bound"].get<double>();
      if (row.contains("error")) rep.measured_error[r] = row["error"].get<double>();
    }
    for (const auto& it : j.at("iterations")) {
      IterationRecord rec;
      rec.index = it.at("index").get<int>();
      rec.step = it.at("step").get<std::string>();
      rec.sigma_sum = it.at("sigma_sum").get<double>();
      rec.nuclear_norm = it.at("nuclear_norm").get<double>();
      rec.solve_time = it.at("solve_time").get<double>();
      rec.solver_iterations = it.at("solver_iterations").get<int>();
      rep.iterations.push_back(std::move(rec));
    }
    rep.warnings = j.at("warnings").get<std::vector<std::string>>();
    rep.degraded = j.at("degraded").get<bool>();
    rep.total_solve_time = j.at("total_solve_time").get<double>();
    rep.balanced = model_from(j.at("balanced"));
    return rep;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace fwbt::io
