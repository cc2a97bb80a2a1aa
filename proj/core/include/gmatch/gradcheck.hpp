#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gmatch/autodiff.hpp"

namespace gmatch {

// Builds a forward graph ending in a scalar. Called repeatedly with fresh
// records; must be deterministic in the current parameter values.
using ScalarFn = std::function<Var(Record&)>;

struct GradCheckReport {
  bool pass = false;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  int coords_checked = 0;
  std::string worst_coord;
};

// Compares reverse-mode gradients against central finite differences,
// coordinate by coordinate, over the given parameters. Relative error uses
// |a-b| / max(|a|, |b|, 1) so zero gradients compare cleanly. Parameters
// are restored bit-exactly. Throws NumericError if f evaluates non-finite.
GradCheckReport finite_diff_check(const ScalarFn& f, const std::vector<Parameter*>& params,
                                  double step = 1e-5, double tolerance = 1e-4);

}  // namespace gmatch
