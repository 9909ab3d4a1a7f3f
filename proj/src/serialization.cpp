#include "mconv/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mconv {

namespace {

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::istringstream in{std::string(raw)};
    Line line{number, {}};
    for (std::string tok; in >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

std::uint64_t parse_unsigned(const std::string& tok, std::size_t line) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
  try {
    return std::stoull(tok);
  } catch (const std::exception&) {
    throw ParseError(line, "integer '" + tok + "' is out of range");
  }
}

double parse_double(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size() || !std::isfinite(v)) throw ParseError(line, "expected a finite number, got '" + tok + "'");
  return v;
}

template <class P>
P parse_point(const std::string& tok, std::size_t line) {
  if constexpr (std::is_same_v<P, double>) {
    return parse_double(tok, line);
  } else {
    const auto v = parse_unsigned(tok, line);
    if (v > UINT32_MAX) throw ParseError(line, "point index too large");
    return P{static_cast<std::uint32_t>(v)};
  }
}

template <class P>
std::string format_point(const P& p) {
  if constexpr (std::is_same_v<P, double>) {
    return format_double(p);
  } else {
    return std::to_string(p.value);
  }
}

}  // namespace

FiniteActionSystem read_system_table(std::string_view text, std::string name) {
  const auto lines = tokenize(text);
  std::size_t cursor = 0;
  auto next = [&](const char* what) -> const Line& {
    if (cursor >= lines.size()) throw ParseError(lines.empty() ? 0 : lines.back().number, std::string("missing ") + what);
    return lines[cursor++];
  };
  const Line& header = next("header 'n m'");
  if (header.tokens.size() != 2) throw ParseError(header.number, "header must be 'n m'");
  const auto n = parse_unsigned(header.tokens[0], header.number);
  const auto m = parse_unsigned(header.tokens[1], header.number);
  if (n == 0 || n > FiniteGroup::kMaxOrder) throw ParseError(header.number, "group order must lie in [1, 256]");
  if (m == 0 || m > 1u << 20) throw ParseError(header.number, "point count must lie in [1, 2^20]");

  auto read_rows = [&](std::size_t rows, std::size_t cols, std::uint64_t limit, const char* what) {
    std::vector<std::uint32_t> out;
    out.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const Line& line = next(what);
      if (line.tokens.size() != cols)
        throw ParseError(line.number, std::string(what) + " row has " + std::to_string(line.tokens.size()) +
                                          " entries, expected " + std::to_string(cols));
      for (const auto& tok : line.tokens) {
        const auto v = parse_unsigned(tok, line.number);
        if (v >= limit) throw ParseError(line.number, std::string(what) + " entry " + tok + " out of range");
        out.push_back(static_cast<std::uint32_t>(v));
      }
    }
    return out;
  };
  auto op = read_rows(n, n, n, "operation table");
  auto action = read_rows(n, m, m, "action table");
  const Line& id_line = next("identity index");
  if (id_line.tokens.size() != 1) throw ParseError(id_line.number, "identity line must hold a single index");
  const auto e = parse_unsigned(id_line.tokens[0], id_line.number);
  if (e >= n) throw ParseError(id_line.number, "identity index out of range");
  if (cursor != lines.size()) throw ParseError(lines[cursor].number, "unexpected trailing content");
  try {
    return FiniteActionSystem(FiniteGroup(n, std::move(op), static_cast<std::uint32_t>(e)), m, std::move(action),
                              std::move(name));
  } catch (const std::invalid_argument& err) {
    throw ParseError(id_line.number, err.what());
  }
}

FiniteActionSystem load_system_table(const std::string& path) { return read_system_table(read_file(path), path); }

std::string write_system_table(const FiniteActionSystem& sys) {
  std::ostringstream out;
  const std::size_t n = sys.group_order();
  out << n << ' ' << sys.point_count() << '\n';
  for (GroupIndex g : sys.elements()) {
    for (GroupIndex h : sys.elements()) out << (h.value ? " " : "") << sys.multiply(g, h).value;
    out << '\n';
  }
  for (GroupIndex g : sys.elements()) {
    for (PointIndex x : sys.points()) out << (x.value ? " " : "") << sys.act(g, x).value;
    out << '\n';
  }
  out << sys.identity().value << '\n';
  return out.str();
}

std::string measure_mode(std::string_view text) {
  const auto lines = tokenize(text);
  if (lines.empty() || lines[0].tokens.size() != 2 || lines[0].tokens[0] != "mode")
    throw ParseError(lines.empty() ? 0 : lines[0].number, "measure must start with 'mode rational' or 'mode float'");
  const auto& mode = lines[0].tokens[1];
  if (mode != "rational" && mode != "float") throw ParseError(lines[0].number, "unknown weight mode '" + mode + "'");
  return mode;
}

template <class P, class S>
std::string write_measure(const FiniteMeasure<P, S>& nu) {
  std::ostringstream out;
  if constexpr (is_exact_v<S>) {
    out << "mode rational\n";
    for (const auto& [p, w] : nu.atoms())
      out << format_point(p) << ' ' << boost::multiprecision::numerator(w).str() << ' '
          << boost::multiprecision::denominator(w).str() << '\n';
  } else {
    out << "mode float\n";
    for (const auto& [p, w] : nu.atoms()) out << format_point(p) << ' ' << format_double(w) << '\n';
  }
  return out.str();
}

template <class P, class S>
FiniteMeasure<P, S> read_measure(std::string_view text) {
  const std::string mode = measure_mode(text);
  const auto lines = tokenize(text);
  std::vector<std::pair<P, S>> atoms;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, tok] = lines[i];
    const P point = parse_point<P>(tok[0], number);
    Rational exact;
    double approx = 0.0;
    if (mode == "rational") {
      if (tok.size() != 3) throw ParseError(number, "rational atoms are '<point> <numerator> <denominator>'");
      try {
        exact = parse_rational(tok[1] + "/" + tok[2]);
      } catch (const std::invalid_argument& err) {
        throw ParseError(number, err.what());
      }
      approx = to_double(exact);
    } else {
      if (tok.size() != 2) throw ParseError(number, "float atoms are '<point> <weight>'");
      approx = parse_double(tok[1], number);
      exact = Rational(approx);
    }
    if constexpr (is_exact_v<S>) {
      atoms.emplace_back(point, exact);
    } else {
      atoms.emplace_back(point, approx);
    }
  }
  try {
    return FiniteMeasure<P, S>(std::move(atoms));
  } catch (const std::invalid_argument& err) {
    throw ParseError(0, err.what());
  }
}

#define MCONV_INSTANTIATE(P, S)                                        \
  template std::string write_measure<P, S>(const FiniteMeasure<P, S>&); \
  template FiniteMeasure<P, S> read_measure<P, S>(std::string_view);
MCONV_INSTANTIATE(PointIndex, Rational)
MCONV_INSTANTIATE(PointIndex, double)
MCONV_INSTANTIATE(GroupIndex, Rational)
MCONV_INSTANTIATE(GroupIndex, double)
MCONV_INSTANTIATE(double, double)
#undef MCONV_INSTANTIATE

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace mconv
