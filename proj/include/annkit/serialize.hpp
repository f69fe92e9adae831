#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "annkit/annulus.hpp"
#include "annkit/calculus.hpp"
#include "annkit/common.hpp"
#include "annkit/laurent.hpp"
#include "annkit/pick.hpp"

namespace annkit {

using json = nlohmann::json;

inline json to_json(Cx z) { return json::array({z.real(), z.imag()}); }

inline Cx cx_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument(std::string(what) +
                                ": expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const BallPoint2& p) {
  return json::array({to_json(p.z1), to_json(p.z2)});
}

inline json to_json(const std::vector<Cx>& pts) {
  json out = json::array();
  for (Cx z : pts) out.push_back(to_json(z));
  return out;
}

inline std::vector<Cx> points_from_json(const json& j) {
  const json& arr = j.is_object() && j.contains("points") ? j["points"] : j;
  if (!arr.is_array())
    throw std::invalid_argument("points: expected an array of [re, im] pairs");
  std::vector<Cx> pts;
  pts.reserve(arr.size());
  for (const json& e : arr) pts.push_back(cx_from_json(e, "points"));
  return pts;
}

// {"n_min": int, "coeffs": [[re, im], ...]} in index order.
inline json to_json(const LaurentPoly& p) {
  json coeffs = json::array();
  for (const Cx& a : p.coeffs()) coeffs.push_back(to_json(a));
  return json{{"n_min", p.is_zero() ? 0 : p.n_min()}, {"coeffs", coeffs}};
}

inline LaurentPoly laurent_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n_min") || !j.contains("coeffs"))
    throw std::invalid_argument("symbol: expected {n_min, coeffs}");
  if (!j["n_min"].is_number_integer())
    throw std::invalid_argument("symbol: n_min must be an integer");
  std::vector<Cx> coeffs;
  for (const json& e : j["coeffs"]) coeffs.push_back(cx_from_json(e, "coeffs"));
  return {j["n_min"].get<int>(), std::move(coeffs)};
}

// {"dim": n, "entries": [[re, im] x n^2]} row-major.
inline json to_json(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("matrix serialization: matrix must be square");
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back(to_json(m(i, j)));
  return json{{"dim", m.rows()}, {"entries", entries}};
}

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
    throw std::invalid_argument("matrix: expected {dim, entries}");
  if (!j["dim"].is_number_integer() || j["dim"].get<long>() < 1)
    throw std::invalid_argument("matrix: dim must be a positive integer");
  const Eigen::Index n = j["dim"].get<Eigen::Index>();
  const json& entries = j["entries"];
  if (!entries.is_array() ||
      entries.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw std::invalid_argument("matrix: entries must hold dim^2 pairs");
  Eigen::MatrixXcd m(n, n);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index jj = 0; jj < n; ++jj)
      m(i, jj) = cx_from_json(entries[k++], "entries");
  require_finite(m, "matrix");
  return m;
}

// {"m_min": int, "n_min": int, "rows": [[[re, im], ...], ...]}.
inline json to_json(const HereditarySeries& h) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < h.coeffs().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < h.coeffs().cols(); ++j)
      row.push_back(to_json(h.coeffs()(i, j)));
    rows.push_back(std::move(row));
  }
  return json{{"m_min", h.is_zero() ? 0 : h.m_min()},
              {"n_min", h.is_zero() ? 0 : h.n_min()},
              {"rows", rows}};
}

inline HereditarySeries hereditary_from_json(const json& j) {
  if (!j.is_object() || !j.contains("m_min") || !j.contains("n_min") ||
      !j.contains("rows"))
    throw std::invalid_argument("hereditary: expected {m_min, n_min, rows}");
  const json& rows = j["rows"];
  if (!rows.is_array())
    throw std::invalid_argument("hereditary: rows must be an array");
  if (rows.empty()) return {};
  const std::size_t cols = rows[0].size();
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      throw std::invalid_argument("hereditary: ragged rows");
    for (std::size_t k = 0; k < cols; ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          cx_from_json(rows[i][k], "rows");
  }
  return {j["m_min"].get<int>(), j["n_min"].get<int>(), std::move(m)};
}

// {"r": real, "nodes": [[re, im], ...], "targets": [[re, im], ...]}.
inline json to_json(const PickProblem& p) {
  return json{
      {"r", p.r}, {"nodes", to_json(p.nodes)}, {"targets", to_json(p.targets)}};
}

inline PickProblem pick_problem_from_json(const json& j) {
  if (!j.is_object() || !j.contains("r") || !j.contains("nodes") ||
      !j.contains("targets"))
    throw std::invalid_argument("pick problem: expected {r, nodes, targets}");
  return make_pick_problem(j["r"].get<double>(), points_from_json(j["nodes"]),
                           points_from_json(j["targets"]));
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

inline void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace annkit
