#include "sopf/model_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace sopf::io {

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw std::runtime_error("matrix: expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::runtime_error("matrix: ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw std::runtime_error("matrix: non-numeric entry");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

Json parametrization_to_json(const StableParametrization& p) {
  Json j;
  j["Jbar"] = matrix_to_json(p.Jbar);
  j["Rbar"] = matrix_to_json(p.Rbar);
  j["Hbar"] = Json::array();
  for (const auto& h : p.Hbar) j["Hbar"].push_back(matrix_to_json(h));
  j["Bhat"] = matrix_to_json(p.Bhat);
  j["Qbar"] = p.Qbar ? matrix_to_json(*p.Qbar) : Json(nullptr);
  j["r_floor"] = p.r_floor;
  j["q_floor"] = p.q_floor;
  return j;
}

StableParametrization parametrization_from_json(const Json& j) {
  StableParametrization p;
  p.Jbar = matrix_from_json(j.at("Jbar"));
  p.Rbar = matrix_from_json(j.at("Rbar"));
  for (const auto& h : j.at("Hbar")) p.Hbar.push_back(matrix_from_json(h));
  p.Bhat = matrix_from_json(j.at("Bhat"));
  if (j.contains("Qbar") && !j.at("Qbar").is_null()) p.Qbar = matrix_from_json(j.at("Qbar"));
  p.r_floor = j.value("r_floor", 1e-8);
  p.q_floor = j.value("q_floor", 1e-8);
  // Bhat with zero inputs serializes as n empty rows.
  if (p.Bhat.rows() == 0) p.Bhat.resize(p.Jbar.rows(), 0);
  p.validate();
  return p;
}

Json certificate_to_json(const CertificationReport& report) {
  Json j;
  j["certified"] = report.certified();
  j["hurwitz"] = report.hurwitz;
  j["abscissa"] = finite_or_null(report.abscissa);
  j["monotone"] = report.monotone;
  j["sigma_min_R"] = finite_or_null(report.sigma_min_R);
  j["energy_preserving"] = report.energy_preserving;
  j["energy_preserving_violation"] = finite_or_null(report.energy_violation);
  j["trapping_radius_per_unit_input"] = finite_or_null(report.trapping_radius_per_unit_input);
  j["generalized"] = report.certificate ? report.certificate->generalized : false;
  j["reason"] = report.reason;
  return j;
}

CertificationReport certify_model(const ModelDocument& doc) {
  if (doc.parametrization && doc.parametrization->generalized()) {
    return generalized_certificate(doc.system, factors(*doc.parametrization).Q);
  }
  return certify(doc.system);
}

Json model_to_json(const ModelDocument& doc) {
  Json j;
  j["format"] = "sopf-model";
  j["version"] = 1;
  j["kind"] = doc.kind;
  j["n"] = doc.system.state_dim();
  j["m"] = doc.system.input_dim();
  j["system"] = {{"A", matrix_to_json(doc.system.A())},
                 {"H", matrix_to_json(doc.system.H())},
                 {"B", matrix_to_json(doc.system.B())}};
  j["parametrization"] =
      doc.parametrization ? parametrization_to_json(*doc.parametrization) : Json(nullptr);
  j["config"] = doc.config;
  j["training"] = doc.training;
  j["certificate"] = doc.certificate;
  return j;
}

ModelDocument model_from_json(const Json& j) {
  if (j.value("format", std::string{}) != "sopf-model") {
    throw std::runtime_error("not a sopf model document");
  }
  const auto n = j.at("n").get<Eigen::Index>();
  const auto m = j.at("m").get<Eigen::Index>();
  const Json& s = j.at("system");
  Matrix B = matrix_from_json(s.at("B"));
  if (B.rows() == 0) B.resize(n, 0);
  if (B.cols() != m) throw std::runtime_error("model: B does not match m");
  ModelDocument doc{j.value("kind", std::string{"custom"}),
                    QuadraticControlSystem(matrix_from_json(s.at("A")),
                                           matrix_from_json(s.at("H")), std::move(B)),
                    std::nullopt,
                    j.value("config", Json::object()),
                    j.value("training", Json::object()),
                    j.value("certificate", Json::object())};
  if (doc.system.state_dim() != n) throw std::runtime_error("model: A does not match n");
  if (j.contains("parametrization") && !j.at("parametrization").is_null()) {
    doc.parametrization = parametrization_from_json(j.at("parametrization"));
  }
  return doc;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_model(const std::filesystem::path& path, ModelDocument doc) {
  doc.certificate = certificate_to_json(certify_model(doc));
  write_json(path, model_to_json(doc));
}

ModelDocument read_model(const std::filesystem::path& path) {
  try {
    return model_from_json(read_json(path));
  } catch (const Json::exception& e) {
    throw std::runtime_error(path.string() + ": malformed model: " + e.what());
  }
}

}  // namespace sopf::io
