#pragma once

// Text matrix files, trim-log JSON and decomposition reports.
//
//   field gf2 | field gfp <p> | field rational | field real <eps>
//   <rows> <cols>
//   <cols tokens per row, '?' for unknown>
//
// Lines starting with '#' and blank lines are ignored anywhere.

#include "clusters.hpp"
#include "trim.hpp"

#include "json.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace matcomp {

class parse_error : public std::runtime_error {
 public:
  parse_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A matrix file split into tokens but not yet interpreted in its field.
struct MatrixText {
  FieldSpec field;
  index_t rows = 0;
  index_t cols = 0;
  std::vector<std::vector<std::string>> tokens;  // rows x cols
  std::vector<std::size_t> line_of_row;          // source line of each row
};

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<std::uint64_t> parse_count(std::string_view s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline FieldSpec parse_field_line(const std::vector<std::string>& t, std::size_t line) {
  if (t.empty() || t[0] != "field") throw parse_error(line, "expected a 'field' header");
  if (t.size() == 2 && t[1] == "gf2") return FieldSpec::gf(2);
  if (t.size() == 2 && t[1] == "rational") return FieldSpec::rationals();
  if (t.size() == 3 && t[1] == "gfp") {
    auto p = parse_count(t[2]);
    if (!p || !is_prime(*p) || *p >= (std::uint64_t{1} << 32))
      throw parse_error(line, "gfp modulus must be a prime below 2^32, got '" + t[2] + "'");
    return FieldSpec::gf(*p);
  }
  if (t.size() == 3 && t[1] == "real") {
    double eps = 0;
    auto [ptr, ec] = std::from_chars(t[2].data(), t[2].data() + t[2].size(), eps);
    if (ec != std::errc{} || ptr != t[2].data() + t[2].size() || !(eps >= 0) || !std::isfinite(eps))
      throw parse_error(line, "real tolerance must be a nonnegative number, got '" + t[2] + "'");
    return FieldSpec::reals(eps);
  }
  throw parse_error(line, "unrecognised field header");
}

}  // namespace detail

inline MatrixText read_matrix_text(std::istream& in) {
  MatrixText mt;
  std::string raw;
  std::size_t lineno = 0;
  int stage = 0;  // 0 header, 1 dims, 2 rows
  while (std::getline(in, raw)) {
    ++lineno;
    const auto body = detail::trim_ws(raw);
    if (body.empty() || body.front() == '#') continue;
    auto t = detail::split_ws(body);
    if (stage == 0) {
      mt.field = detail::parse_field_line(t, lineno);
      stage = 1;
    } else if (stage == 1) {
      std::optional<std::uint64_t> r, c;
      if (t.size() == 2) {
        r = detail::parse_count(t[0]);
        c = detail::parse_count(t[1]);
      }
      if (!r || !c) throw parse_error(lineno, "expected '<rows> <cols>'");
      mt.rows = *r;
      mt.cols = *c;
      stage = 2;
    } else {
      if (mt.cols == 0 || mt.tokens.size() == mt.rows)
        throw parse_error(lineno, "more rows than the declared " + std::to_string(mt.rows));
      if (t.size() != mt.cols)
        throw parse_error(lineno, "expected " + std::to_string(mt.cols) + " entries, found " +
                                      std::to_string(t.size()));
      mt.tokens.push_back(std::move(t));
      mt.line_of_row.push_back(lineno);
    }
  }
  if (stage == 0) throw parse_error(lineno + 1, "missing 'field' header");
  if (stage == 1) throw parse_error(lineno + 1, "missing dimensions line");
  const index_t expected = mt.cols == 0 ? 0 : mt.rows;
  if (mt.tokens.size() != expected)
    throw parse_error(lineno + 1, "expected " + std::to_string(expected) + " rows, found " +
                                      std::to_string(mt.tokens.size()));
  return mt;
}

template <Field F>
PartialMatrix<F> to_partial(const MatrixText& mt, const F& field) {
  std::vector<Entry<F>> es;
  for (index_t i = 0; i < mt.tokens.size(); ++i)
    for (index_t j = 0; j < mt.cols; ++j) {
      const auto& tok = mt.tokens[i][j];
      if (tok == "?") continue;
      auto v = field.parse(tok);
      if (!v) throw parse_error(mt.line_of_row[i], "'" + tok + "' is not a value of the declared field");
      es.push_back({i, j, *v});
    }
  return PartialMatrix<F>(field, mt.rows, mt.cols, std::move(es));
}

/// Parses a file and calls fn with the PartialMatrix over its declared field.
template <class Fn>
decltype(auto) visit_matrix(const MatrixText& mt, Fn&& fn) {
  return visit_field(mt.field, [&](auto field) { return fn(to_partial(mt, field)); });
}

inline std::string field_header(const FieldSpec& spec) {
  switch (spec.kind) {
    case FieldKind::prime:
      return spec.modulus == 2 ? "field gf2" : "field gfp " + std::to_string(spec.modulus);
    case FieldKind::rational:
      return "field rational";
    case FieldKind::real: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, spec.tolerance);
      return "field real " + std::string(buf, ptr);
    }
  }
  return "field ?";
}

template <Field F>
void write_matrix(std::ostream& out, const PartialMatrix<F>& m) {
  const F& f = m.field();
  out << field_header(f.spec()) << '\n' << m.rows() << ' ' << m.cols() << '\n';
  if (m.cols() == 0) return;
  for (index_t i = 0; i < m.rows(); ++i) {
    auto row = m.row_entries(i);
    std::size_t k = 0;
    for (index_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      if (k < row.size() && row[k].col == j) {
        out << f.format(row[k++].value);
      } else {
        out << '?';
      }
    }
    out << '\n';
  }
}

template <Field F>
void write_matrix(std::ostream& out, const DenseMatrix<F>& m) {
  const F& f = m.field();
  out << field_header(f.spec()) << '\n' << m.rows() << ' ' << m.cols() << '\n';
  if (m.cols() == 0) return;
  for (index_t i = 0; i < m.rows(); ++i) {
    for (index_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << f.format(m(i, j));
    }
    out << '\n';
  }
}

template <class M>
std::string matrix_to_string(const M& m) {
  std::ostringstream s;
  write_matrix(s, m);
  return s.str();
}

template <Field F>
nlohmann::ordered_json trim_log_json(const TrimLog<F>& log, const F& f) {
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const auto& r : log.records) {
    nlohmann::ordered_json j;
    j["axis"] = to_string(r.axis);
    j["index"] = r.index;
    j["donors"] = r.donors;
    if (!r.approximate) {
      nlohmann::ordered_json cs = nlohmann::ordered_json::array();
      for (const auto& c : r.coefficients) cs.push_back(f.format(c));
      j["coefficients"] = std::move(cs);
    }
    j["approximate"] = r.approximate;
    nlohmann::ordered_json known = nlohmann::ordered_json::array();
    for (const auto& [x, v] : r.known) known.push_back({x, f.format(v)});
    j["known"] = std::move(known);
    records.push_back(std::move(j));
  }
  return {{"rows", log.rows}, {"cols", log.cols}, {"records", std::move(records)}};
}

/// Inverse of trim_log_json; throws parse_error (line 0) on malformed input.
template <Field F>
TrimLog<F> trim_log_from_json(const nlohmann::ordered_json& j, const F& f) {
  auto value = [&](const nlohmann::ordered_json& s) {
    if (!s.is_string()) throw parse_error(0, "field literal must be a string");
    auto v = f.parse(s.get<std::string>());
    if (!v) throw parse_error(0, "'" + s.get<std::string>() + "' is not a field value");
    return *v;
  };
  try {
    TrimLog<F> log;
    log.rows = j.at("rows").get<index_t>();
    log.cols = j.at("cols").get<index_t>();
    for (const auto& r : j.at("records")) {
      TrimRecord<F> rec;
      const auto axis = r.at("axis").get<std::string>();
      if (axis != "row" && axis != "col") throw parse_error(0, "axis must be 'row' or 'col'");
      rec.axis = axis == "row" ? Axis::row : Axis::col;
      rec.index = r.at("index").get<index_t>();
      rec.donors = r.at("donors").get<std::vector<index_t>>();
      rec.approximate = r.at("approximate").get<bool>();
      if (!rec.approximate)
        for (const auto& c : r.at("coefficients")) rec.coefficients.push_back(value(c));
      for (const auto& k : r.at("known")) rec.known.emplace_back(k.at(0).get<index_t>(), value(k.at(1)));
      log.records.push_back(std::move(rec));
    }
    return log;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(0, std::string("malformed trim log: ") + e.what());
  }
}

/// Junk lines and clusters in the coordinates of m.
struct DecompositionReport {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<index_t> junk_rows;
  std::vector<index_t> junk_cols;
  std::vector<std::pair<std::vector<index_t>, std::vector<index_t>>> clusters;
};

template <Field F>
DecompositionReport decomposition_report(const PartialMatrix<F>& m) {
  const auto rep = strip_junk(m);
  DecompositionReport out{m.rows(), m.cols(), rep.junk_rows, rep.junk_cols, {}};
  if (rep.core.rows() == 0 || rep.core.cols() == 0) return out;
  for (const auto& c : decompose(rep.core).clusters) {
    std::vector<index_t> r, k;
    for (index_t i : c.rows) r.push_back(rep.row_map[i]);
    for (index_t j : c.cols) k.push_back(rep.col_map[j]);
    out.clusters.emplace_back(std::move(r), std::move(k));
  }
  return out;
}

inline nlohmann::ordered_json to_json(const DecompositionReport& d) {
  nlohmann::ordered_json cs = nlohmann::ordered_json::array();
  for (const auto& [r, c] : d.clusters) cs.push_back({{"rows", r}, {"cols", c}});
  return {{"rows", d.rows}, {"cols", d.cols}, {"junk_rows", d.junk_rows},
          {"junk_cols", d.junk_cols}, {"clusters", std::move(cs)}};
}

inline void write_report(std::ostream& out, const DecompositionReport& d) {
  auto list = [&](const std::vector<index_t>& v) {
    if (v.empty()) {
      out << " -";
      return;
    }
    for (index_t x : v) out << ' ' << x;
  };
  out << "junk rows:";
  list(d.junk_rows);
  out << "\njunk cols:";
  list(d.junk_cols);
  out << "\nclusters: " << d.clusters.size() << '\n';
  for (std::size_t k = 0; k < d.clusters.size(); ++k) {
    out << "cluster " << k << " rows:";
    list(d.clusters[k].first);
    out << " cols:";
    list(d.clusters[k].second);
    out << '\n';
  }
}

}  // namespace matcomp
