#include "gmatch/gradcheck.hpp"

#include <cmath>

#include "gmatch/error.hpp"

namespace gmatch {

namespace {

double eval_scalar(const ScalarFn& f) {
  Record rec;
  Var out = f(rec);
  const double v = rec.value(out).scalar_value();
  if (!std::isfinite(v)) throw NumericError("finite_diff_check: function value is not finite");
  return v;
}

}  // namespace

GradCheckReport finite_diff_check(const ScalarFn& f, const std::vector<Parameter*>& params, double step,
                                  double tolerance) {
  if (step <= 0.0) throw NumericError("finite_diff_check: step must be positive");

  GradMap analytic;
  {
    Record rec;
    Var out = f(rec);
    if (!std::isfinite(rec.value(out).scalar_value())) {
      throw NumericError("finite_diff_check: function value is not finite");
    }
    analytic = rec.backward(out);
  }

  GradCheckReport report;
  report.pass = true;
  for (Parameter* p : params) {
    auto it = analytic.find(p);
    const Tensor grad = it != analytic.end() ? it->second : Tensor(p->value.shape());
    for (std::int64_t i = 0; i < p->numel(); ++i) {
      const double saved = p->value.data()[i];
      p->value.data()[i] = saved + step;
      const double up = eval_scalar(f);
      p->value.data()[i] = saved - step;
      const double down = eval_scalar(f);
      p->value.data()[i] = saved;

      const double fd = (up - down) / (2.0 * step);
      const double g = grad.data()[i];
      const double abs_err = std::abs(fd - g);
      const double rel_err = abs_err / std::max({std::abs(fd), std::abs(g), 1.0});
      ++report.coords_checked;
      if (rel_err > report.max_rel_error) {
        report.max_rel_error = rel_err;
        report.worst_coord = p->name + "[" + std::to_string(i) + "]";
      }
      report.max_abs_error = std::max(report.max_abs_error, abs_err);
    }
  }
  report.pass = report.max_rel_error <= tolerance;
  return report;
}

}  // namespace gmatch
