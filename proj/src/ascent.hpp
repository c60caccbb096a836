#pragma once

// Multi-start ascent of r.p - beta sum_{i in P} q_i f(p_i / q_i) over the
// face of the simplex spanned by `support`, in softmax coordinates.

#include <cstddef>
#include <span>
#include <vector>

#include "fdpo/generators.hpp"
#include "fdpo/simplex.hpp"

namespace fdpo::detail {

struct FaceProblem {
  std::span<const double> r;
  std::span<const double> q;
  double beta = 1.0;
  const Generator* gen = nullptr;
  /// penalized[i] != 0 when coordinate i carries the divergence term.
  std::span<const char> penalized;
  std::vector<std::size_t> support;
};

SolveResult ascend_face(const FaceProblem& prob, const SolveOptions& opts, std::size_t restarts);

}  // namespace fdpo::detail
