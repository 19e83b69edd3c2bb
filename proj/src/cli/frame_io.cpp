#include "framekit/cli.hpp"

#include "framekit/error.hpp"

#include <cmath>
#include <cstdio>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace framekit::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw FrameError(ErrorCode::ParseError, what); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vectors_json(const Frame& f) {
  json out = json::array();
  for (const auto& v : f.vectors()) out.push_back(v);
  return out;
}

Frame frame_from_rows(const json& j, int dim, const std::string& what) {
  const Matrix rows = parse_matrix(j, what);
  if (rows.cols() != dim) {
    fail(what + " vectors have length " + std::to_string(rows.cols()) + " but dim is " +
         std::to_string(dim));
  }
  try {
    return Frame(rows.transpose());
  } catch (const FrameError& e) {
    fail(what + ": " + e.what());
  }
}

}  // namespace

Matrix parse_matrix(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) fail(what + " must be a nonempty array of rows");
  const auto cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) fail(what + " rows must be nonempty arrays");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols) {
      fail(what + " row " + std::to_string(r + 1) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) fail(what + " entries must be numbers");
      const double v = row[c].get<double>();
      if (!std::isfinite(v)) fail(what + " entries must be finite");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return m;
}

FrameInput parse_frame_input(const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_object()) fail("frame file must be a JSON object");
  for (const char* key : {"dim", "vectors", "K"}) {
    if (!j.contains(key)) fail(std::string("missing field \"") + key + "\"");
  }
  if (!j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    fail("\"dim\" must be a positive integer");
  }
  const int dim = j["dim"].get<int>();
  double tol = kDefaultTol;
  if (j.contains("tol")) {
    if (!j["tol"].is_number() || j["tol"].get<double>() <= 0.0) fail("\"tol\" must be positive");
    tol = j["tol"].get<double>();
  }
  Frame frame = frame_from_rows(j["vectors"], dim, "\"vectors\"");
  const Matrix k = parse_matrix(j["K"], "\"K\"");
  if (k.rows() != dim || k.cols() != dim) fail("\"K\" must be dim x dim");
  std::optional<Frame> dual;
  if (j.contains("dual") && !j["dual"].is_null()) {
    dual = frame_from_rows(j["dual"], dim, "\"dual\"");
    if (dual->size() != frame.size()) fail("\"dual\" must have as many vectors as \"vectors\"");
  }
  return FrameInput{std::move(frame), build_operator(k, tol), std::move(dual), tol};
}

FrameInput load_frame_input(const std::string& path) { return parse_frame_input(read_file(path)); }

std::string serialize_frame_input(const Frame& f, const Matrix& k, std::optional<double> tol,
                                  const Frame* dual) {
  json j;
  j["dim"] = f.dim();
  j["vectors"] = vectors_json(f);
  j["K"] = matrix_json(k);
  if (tol) j["tol"] = *tol;
  if (dual) j["dual"] = vectors_json(*dual);
  return j.dump(2);
}

Matrix load_operator_matrix(const std::string& path) {
  const json j = parse_json(read_file(path));
  const Matrix k = parse_matrix(j.is_object() ? j.value("K", json()) : j, "\"K\"");
  if (k.rows() != k.cols()) fail("\"K\" must be square");
  return k;
}

json round_reals(const json& j, int digits) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) return nullptr;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(round_reals(e, digits));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = round_reals(it.value(), digits);
    return out;
  }
  return j;
}

namespace {

std::string scalar_text(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return "-";
  return j.dump();
}

bool is_flat_array(const json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j) {
    if (e.is_object() || e.is_array()) return false;
  }
  return true;
}

void render_table(const json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      render_table(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
    return;
  }
  if (j.is_array() && !is_flat_array(j)) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      render_table(j[i], prefix + "[" + std::to_string(i + 1) + "]", out);
    }
    return;
  }
  std::string value;
  if (j.is_array()) {
    value = "(";
    for (std::size_t i = 0; i < j.size(); ++i) value += (i ? ", " : "") + scalar_text(j[i]);
    value += ")";
  } else {
    value = scalar_text(j);
  }
  out.emplace_back(prefix, value);
}

}  // namespace

std::string render(const json& report, OutputFormat format) {
  if (format == OutputFormat::Json) return round_reals(report, 12).dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  render_table(round_reals(report, 6), "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream out;
  for (const auto& [key, value] : rows) {
    out << key << std::string(width - key.size() + 2, ' ') << value << '\n';
  }
  return out.str();
}

}  // namespace framekit::cli
