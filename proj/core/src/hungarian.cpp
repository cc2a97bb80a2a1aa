#include "gmatch/hungarian.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "gmatch/error.hpp"

namespace gmatch {

PermutationMatrix hungarian(const Tensor& scores) {
  if (scores.rank() != 2 || scores.dim(0) != scores.dim(1) || scores.dim(0) < 1) {
    throw ShapeError("hungarian: scores must be square and nonempty, got " +
                     shape_to_string(scores.shape()));
  }
  if (!scores.all_finite()) throw NumericError("hungarian: non-finite score entries");
  const int n = scores.dim(0);
  const double kInf = std::numeric_limits<double>::infinity();

  // Minimization with potentials on cost = -scores; arrays are 1-based with
  // column 0 as the virtual start of each augmenting phase.
  auto cost = [&](int i, int j) { return -scores.at(i - 1, j - 1); };
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<bool> used(n + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    minv.assign(n + 1, kInf);
    used.assign(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> column_of_row(n);
  for (int j = 1; j <= n; ++j) column_of_row[p[j] - 1] = j - 1;
  return PermutationMatrix::from_indices(std::move(column_of_row));
}

double assignment_objective(const Tensor& scores, const PermutationMatrix& p) {
  if (scores.dim(0) != p.n()) throw ShapeError("assignment_objective: size mismatch");
  double total = 0.0;
  for (int i = 0; i < p.n(); ++i) total += scores.at(i, p(i));
  return total;
}

}  // namespace gmatch
