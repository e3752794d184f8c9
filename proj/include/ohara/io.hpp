#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curve.hpp"
#include "errors.hpp"
#include "flow.hpp"
#include "quadrature.hpp"
#include "spectral.hpp"
#include "verify.hpp"

namespace ohara::io {

using nlohmann::json;

struct CurveFile {
  Samples points;
  bool closed = true;
};

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Rows of numbers separated by commas or whitespace; a leading line that does
// not parse as numbers is taken as a header.
inline Samples parse_csv(const std::string& text, const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t' || ch == '\r') ch = ' ';
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    bool numeric = true;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (row.empty() && numeric) continue;
    if (!numeric) {
      require(first, "malformed " + what + ": non-numeric row '" + line + "'");
      first = false;
      continue;
    }
    first = false;
    require(rows.empty() || row.size() == rows.front().size(), "malformed " + what + ": ragged rows");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), "malformed " + what + ": no data rows");
  Samples s(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c) s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  return s;
}

inline Samples samples_from_json(const json& arr, const std::string& what) {
  require(arr.is_array() && !arr.empty(), "malformed " + what + ": expected a non-empty array of points");
  const std::size_t n = arr.front().size();
  Samples s(static_cast<Eigen::Index>(arr.size()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    require(arr[i].is_array() && arr[i].size() == n, "malformed " + what + ": ragged or non-array point");
    for (std::size_t c = 0; c < n; ++c) {
      require(arr[i][c].is_number(), "malformed " + what + ": non-numeric coordinate");
      s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = arr[i][c].get<double>();
    }
  }
  return s;
}

inline json samples_to_json(const Samples& s) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < s.cols(); ++c) row.push_back(s(i, c));
    arr.push_back(std::move(row));
  }
  return arr;
}

// {"dimension": n, "points": [[x, y, ...], ...], "closed": true} or CSV.
inline CurveFile read_curve(const std::string& path) {
  const std::string text = read_text(path);
  CurveFile f;
  if (ends_with(path, ".csv") || ends_with(path, ".txt")) {
    f.points = parse_csv(text, "curve file");
    return f;
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError("malformed curve file: " + std::string(e.what()));
  }
  require(j.is_object() && j.contains("points"), "malformed curve file: missing \"points\"");
  f.points = samples_from_json(j["points"], "curve file");
  if (j.contains("dimension"))
    require(j["dimension"].is_number_integer() && j["dimension"].get<long>() == f.points.cols(),
            "malformed curve file: \"dimension\" does not match the points");
  if (j.contains("closed")) {
    require(j["closed"].is_boolean(), "malformed curve file: \"closed\" must be a boolean");
    f.closed = j["closed"].get<bool>();
  }
  return f;
}

inline json curve_json(const ClosedCurve& c) {
  return {{"dimension", c.dimension()}, {"points", samples_to_json(c.positions().samples())}, {"closed", true},
          {"length", c.length()}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(out.good(), "cannot write " + path);
  out << text;
}

// Periodic samples resampled to m points through their trigonometric
// interpolant (the identity when the counts agree).
inline Samples resample_periodic(const Samples& s, std::size_t m) {
  if (static_cast<std::size_t>(s.rows()) == m) return s;
  Samples out(static_cast<Eigen::Index>(m), s.cols());
  for (Eigen::Index c = 0; c < s.cols(); ++c) {
    std::vector<double> col(static_cast<std::size_t>(s.rows()));
    for (Eigen::Index i = 0; i < s.rows(); ++i) col[static_cast<std::size_t>(i)] = s(i, c);
    const auto v = spectral::synthesize(spectral::pad(spectral::analyze(col), m));
    for (std::size_t i = 0; i < m; ++i) out(static_cast<Eigen::Index>(i), c) = v[i];
  }
  return out;
}

// A field file holds samples at equal arclength steps starting at the curve's
// first node: {"dimension": n, "values": [[...], ...]} (or "points") or CSV.
inline Field read_field(const std::string& path, const ClosedCurve& curve) {
  const std::string text = read_text(path);
  Samples s;
  if (ends_with(path, ".csv") || ends_with(path, ".txt")) {
    s = parse_csv(text, "field file");
  } else {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw ValidationError("malformed field file: " + std::string(e.what()));
    }
    require(j.is_object() && (j.contains("values") || j.contains("points")),
            "malformed field file: missing \"values\"");
    s = samples_from_json(j.contains("values") ? j["values"] : j["points"], "field file");
  }
  require(s.cols() == curve.dimension(), "field dimension differs from the curve's");
  require(s.rows() >= 4, "field file needs at least 4 samples");
  return Field(curve.length(), resample_periodic(s, curve.size()));
}

inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Row-major CSV with a commented header; the diagonal is written as nan.
inline std::string grid_csv(const PairGrid& g) {
  std::ostringstream os;
  os << "# grid=" << g.label << " M=" << g.size() << " L=" << number(g.length) << " alpha=" << number(g.params.alpha)
     << " p=" << number(g.params.p) << " beta=" << (g.beta ? number(*g.beta) : std::string("none"))
     << " band=" << g.band << "\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (j) os << ',';
      os << number(g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    os << '\n';
  }
  return os.str();
}

inline json grid_summary(const PairGrid& g) {
  json flagged = json::array();
  for (const auto& [i, j] : g.flagged) flagged.push_back({i, j});
  return {{"grid", g.label},        {"M", g.size()},
          {"sup", g.sup()},         {"l1", g.l1()},
          {"flagged_pairs", flagged}, {"sup_offband", g.sup_offband},
          {"sup_band", g.sup_band}, {"l1_offband", g.l1_offband},
          {"l1_band", g.l1_band},   {"l1_error_estimate", g.l1_error}};
}

inline json limit_json(const LimitReport& r) {
  json samples = json::array();
  for (const auto& [ds, v] : r.samples) samples.push_back({ds, v});
  return {{"which", r.which},       {"s", r.s},
          {"samples", samples},     {"extrapolated", r.extrapolated},
          {"reference", r.reference}, {"gap", r.gap},
          {"relative_gap", r.relative_gap}};
}

inline std::string flow_trace_csv(const FlowState& s) {
  std::ostringstream os;
  os << "step,energy,grad_norm,dt\n";
  os << 0 << ',' << number(s.energy.front()) << ",,\n";
  for (std::size_t k = 0; k < s.step; ++k)
    os << k + 1 << ',' << number(s.energy[k + 1]) << ',' << number(s.grad_norm[k]) << ',' << number(s.dts[k]) << '\n';
  return os.str();
}

}  // namespace ohara::io
