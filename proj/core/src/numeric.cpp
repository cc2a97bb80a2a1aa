#include "gmatch/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace gmatch::numeric {

namespace {

// Total order on doubles: by value, then by sign bit so -0.0 < +0.0. Inputs
// are finite by the tensor invariant.
inline bool total_less(double a, double b) {
  if (a != b) return a < b;
  return std::signbit(a) && !std::signbit(b);
}

}  // namespace

double canonical_sum(std::span<double> buf) {
  std::sort(buf.begin(), buf.end(), total_less);
  double acc = 0.0;
  for (double x : buf) acc += x;
  return acc;
}

double sum(std::span<const double> buf) {
  double acc = 0.0;
  for (double x : buf) acc += x;
  return acc;
}

void matmul_acc(const double* a, const double* b, double* c, int n, int k, int p) {
  for (int i = 0; i < n; ++i) {
    const double* ai = a + static_cast<std::size_t>(i) * k;
    double* ci = c + static_cast<std::size_t>(i) * p;
    for (int t = 0; t < k; ++t) {
      const double av = ai[t];
      const double* bt = b + static_cast<std::size_t>(t) * p;
      for (int j = 0; j < p; ++j) ci[j] += av * bt[j];
    }
  }
}

void matmul_canonical(const double* a, const double* b, double* c, int n, int k, int p) {
  std::vector<double> buf(static_cast<std::size_t>(k));
  for (int i = 0; i < n; ++i) {
    const double* ai = a + static_cast<std::size_t>(i) * k;
    double* ci = c + static_cast<std::size_t>(i) * p;
    for (int j = 0; j < p; ++j) {
      for (int t = 0; t < k; ++t) buf[static_cast<std::size_t>(t)] = ai[t] * b[static_cast<std::size_t>(t) * p + j];
      ci[j] += canonical_sum(buf);
    }
  }
}

void matmul_grad_a_acc(const double* dc, const double* b, double* da, int n, int k, int p) {
  // da[i][t] += sum_j dc[i][j] * b[t][j]
  for (int i = 0; i < n; ++i) {
    const double* dci = dc + static_cast<std::size_t>(i) * p;
    double* dai = da + static_cast<std::size_t>(i) * k;
    for (int t = 0; t < k; ++t) {
      const double* bt = b + static_cast<std::size_t>(t) * p;
      double acc = 0.0;
      for (int j = 0; j < p; ++j) acc += dci[j] * bt[j];
      dai[t] += acc;
    }
  }
}

void matmul_grad_b_acc(const double* a, const double* dc, double* db, int n, int k, int p) {
  // db[t][j] += sum_i a[i][t] * dc[i][j]
  for (int i = 0; i < n; ++i) {
    const double* ai = a + static_cast<std::size_t>(i) * k;
    const double* dci = dc + static_cast<std::size_t>(i) * p;
    for (int t = 0; t < k; ++t) {
      const double av = ai[t];
      if (av == 0.0) continue;
      double* dbt = db + static_cast<std::size_t>(t) * p;
      for (int j = 0; j < p; ++j) dbt[j] += av * dci[j];
    }
  }
}

double log_sum_exp(std::span<const double> row, std::vector<double>& scratch) {
  double m = -HUGE_VAL;
  for (double x : row) m = std::max(m, x);
  if (!std::isfinite(m)) return m;  // all -inf stays -inf
  scratch.resize(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) scratch[i] = std::exp(row[i] - m);
  return m + std::log(canonical_sum(scratch));
}

}  // namespace gmatch::numeric
