#pragma once

#include "mconv/groups_actions.hpp"
#include "mconv/measures.hpp"
#include "oracles.hpp"

namespace testing_support {

template <class I>
oracle::Weights weights_of(const mconv::FiniteMeasure<I, mconv::Rational>& nu) {
  oracle::Weights out;
  for (const auto& [p, w] : nu.atoms()) out[p.value] = w;
  return out;
}

inline mconv::Rational q(std::int64_t p, std::int64_t d = 1) { return mconv::Rational(p, d); }

}  // namespace testing_support
