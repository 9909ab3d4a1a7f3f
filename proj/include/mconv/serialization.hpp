#pragma once

#include "mconv/groups_actions.hpp"
#include "mconv/measures.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mconv {

/// Malformed text input; `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads a finite system table:
///
///   # comment
///   n m              group order and point count
///   n rows of n ints operation table, row g column h = index of g*h
///   n rows of m ints action table, row g column x = g.x
///   e                identity index
///
/// Blank lines and '#' comments are ignored. Structural problems raise
/// ParseError with the offending line; group or action axiom violations raise
/// ParseError pointing at the identity line, wrapping the validator message.
FiniteActionSystem read_system_table(std::string_view text, std::string name = "table");
FiniteActionSystem load_system_table(const std::string& path);
std::string write_system_table(const FiniteActionSystem& sys);

/// Measure text format:
///
///   mode rational|float
///   <point> <numerator> <denominator>    (rational mode)
///   <point> <weight>                     (float mode)
///
/// Points are indices on finite spaces and reals in [0, 1) on the circle.
/// Rational round trips are lossless; float weights are written in shortest
/// round-trip form, so float round trips are lossless too.
template <class P, class S>
std::string write_measure(const FiniteMeasure<P, S>& nu);

template <class P, class S>
FiniteMeasure<P, S> read_measure(std::string_view text);

/// Weight mode declared in a measure text ("rational" or "float").
std::string measure_mode(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace mconv
