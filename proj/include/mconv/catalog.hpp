#pragma once

#include "mconv/groups_actions.hpp"
#include "mconv/measures.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace mconv {

/// Group of the listed permutations of {0, ..., m-1}, with (gh).x = g(h(x)).
/// The list must be closed under composition and contain the identity.
FiniteGroup permutation_group(const std::vector<std::vector<std::uint32_t>>& perms);

/// The listed permutations acting on {0, ..., m-1} in the natural way.
FiniteActionSystem permutation_action(const std::vector<std::vector<std::uint32_t>>& perms, std::string name);

/// Z_n acting on itself by addition.
FiniteActionSystem cyclic_rotation(std::size_t n, std::string name = {});

/// The one-element group acting trivially on m points.
FiniteActionSystem trivial_system(std::size_t points);

/// Built-in finite systems: z2-swap, z3-rotation, s3-natural, dihedral-4.
std::vector<std::string> builtin_finite_names();
FiniteActionSystem builtin_finite_system(std::string_view name);

inline constexpr std::string_view kCircleScenario = "circle-rotation-uniform";

/// Test functions on a finite space of m points:
///   const(c)            the constant c
///   indicator(i, j, ...) indicator of the listed points
///   table(v0, ..., v_{m-1}) explicit values (rationals or decimals)
/// Bounds are the sup norm of the values.
template <class S>
TestFunction<PointIndex, S> finite_test_function(std::string_view label, std::size_t points);

/// Test functions on the circle (theta in turns):
///   const(c), cos(k), sin(k), cos2(k) = cos^2(2 pi k theta),
///   trig(c0, a1, b1, a2, b2, ...) = c0 + sum_k a_k cos(2 pi k theta) + b_k sin(2 pi k theta)
/// Bounds are |c0| + sum |a_k| + |b_k| (and 1 for the shorthands).
TestFunction<double, double> circle_test_function(std::string_view label);

/// Splits "name(a, b, c)" into name and trimmed arguments.
struct ParsedLabel {
  std::string name;
  std::vector<std::string> args;
};
ParsedLabel parse_label(std::string_view label);

}  // namespace mconv
