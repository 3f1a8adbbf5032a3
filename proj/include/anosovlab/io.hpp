#pragma once

// JSON/CSV plumbing for the command line tool: matrix and domain parsing,
// RFC-4180 CSV, atomic file output. Every artifact carries the tool version
// and the config that produced it.

#include "core.hpp"
#include "hilbert.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace anosovlab::io {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal for a double.
inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string fixed(double x, int places) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, x);
  return buf;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

/// {"dim": d, "field": "real"|"complex", "rows": [[...]]}; complex scalars
/// are [re, im] pairs (a bare number is accepted as real).
struct MatrixInput {
  bool complex = false;
  MatR real;
  MatC cplx;
};

inline MatrixInput parse_matrix(const json& j) {
  try {
    const int d = j.at("dim").get<int>();
    const std::string field = j.value("field", "real");
    const auto& rows = j.at("rows");
    if (d < 2) throw Error(ErrorCode::DimMismatch, "dim must be >= 2");
    if (field != "real" && field != "complex") throw Error(ErrorCode::ParseError, "field must be real or complex");
    if (!rows.is_array() || static_cast<int>(rows.size()) != d)
      throw Error(ErrorCode::DimMismatch, "rows must have dim entries");
    MatrixInput out;
    out.complex = field == "complex";
    out.real.resize(d, d);
    out.cplx.resize(d, d);
    for (int i = 0; i < d; ++i) {
      if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != d)
        throw Error(ErrorCode::DimMismatch, "row " + std::to_string(i) + " has the wrong length");
      for (int k = 0; k < d; ++k) {
        const auto& e = rows[i][k];
        std::complex<double> z;
        if (e.is_array()) {
          if (e.size() != 2) throw Error(ErrorCode::ParseError, "complex entries are [re, im]");
          z = {e[0].get<double>(), e[1].get<double>()};
        } else {
          z = e.get<double>();
        }
        if (!out.complex && z.imag() != 0.0) throw Error(ErrorCode::ParseError, "complex entry in a real matrix");
        out.real(i, k) = z.real();
        out.cplx(i, k) = z;
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("matrix: ") + e.what());
  }
}

inline json matrix_json(const MatR& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(r);
  }
  return {{"dim", m.rows()}, {"field", "real"}, {"rows", rows}};
}

inline json vec_json(const VecR& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline VecR parse_vec(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "expected a number array");
  VecR v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

/// "a,b,c" -> vector.
inline VecR parse_csv_vec(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (used != tok.size() && tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad number '" + tok + "'");
    }
  }
  VecR v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

/// Domains:
///   {"type": "ellipsoid", "center": [...], "shape": [[...]]}    chart x0 = 1
///   {"type": "ellipsoid_form", "form": [[...]], "inside": [...]}
///   {"type": "polytope", "A": [[...]], "b": [...]}             {Ax <= b}, chart x0 = 1
///   {"type": "polytope_cone", "chart": [...], "halfspaces": [[...]]}
///   {"type": "ball", "dim": n}                                 unit ball in R^n
inline hilbert::ConvexDomain parse_domain(const json& j) {
  try {
    const std::string type = j.at("type").get<std::string>();
    auto mat = [](const json& rows) {
      MatR m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.at(0).size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != static_cast<std::size_t>(m.cols())) throw Error(ErrorCode::DimMismatch, "ragged rows");
        for (std::size_t k = 0; k < rows[i].size(); ++k)
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k].get<double>();
      }
      return m;
    };
    if (type == "ball") {
      const int n = j.at("dim").get<int>();
      return hilbert::ConvexDomain::ellipsoid(VecR::Zero(n), MatR::Identity(n, n));
    }
    if (type == "ellipsoid") return hilbert::ConvexDomain::ellipsoid(parse_vec(j.at("center")), mat(j.at("shape")));
    if (type == "ellipsoid_form")
      return hilbert::ConvexDomain::ellipsoid_form(mat(j.at("form")), parse_vec(j.at("inside")));
    if (type == "polytope") return hilbert::ConvexDomain::polytope_chart(mat(j.at("A")), parse_vec(j.at("b")));
    if (type == "polytope_cone") {
      std::vector<VecR> hs;
      for (const auto& h : j.at("halfspaces")) hs.push_back(parse_vec(h));
      return hilbert::ConvexDomain::polytope(parse_vec(j.at("chart")), hs);
    }
    throw Error(ErrorCode::ParseError, "unknown domain type " + type);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("domain: ") + e.what());
  }
}

/// RFC-4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw Error(ErrorCode::DimMismatch, "csv row width differs from header");
    rows_.push_back(std::move(row));
  }
  /// Leading '#' lines carry the version and the config echo; gnuplot and
  /// most readers skip them as comments.
  std::string str(const json& config) const {
    std::string out = "# anosovlab " + std::string(kVersion) + "\r\n# config " + config.dump() + "\r\n";
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(r[i]);
      out += "\r\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }
  std::size_t size() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temp file and renames over the target.
inline void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto " + path);
  }
}

/// JSON artifact with version and config echo at the top.
inline json envelope(const json& config) {
  json out;
  out["tool"] = "anosovlab";
  out["version"] = kVersion;
  out["config"] = config;
  return out;
}

inline json error_json(const Error& e) {
  return {{"error", to_string(e.code())}, {"message", e.what()}};
}

}  // namespace anosovlab::io
