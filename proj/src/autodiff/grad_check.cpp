#include "sahg/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "sahg/error.hpp"

namespace sahg::ad {

namespace {

double evaluate(const ScalarFn& f) {
  Tape<double> tape;
  tape.set_enabled(false);
  return f(tape).item();
}

}  // namespace

GradCheckReport grad_check(const ScalarFn& f, std::vector<Tensor<double>> leaves, double h, double floor) {
  for (auto& leaf : leaves) {
    leaf.set_requires_grad(true);
    leaf.grad();
    leaf.zero_grad();
  }
  {
    Tape<double> tape;
    auto loss = f(tape);
    tape.backward(loss);
  }

  GradCheckReport report;
  for (std::size_t li = 0; li < leaves.size(); ++li) {
    auto& leaf = leaves[li];
    const std::vector<double> analytic(leaf.grad().begin(), leaf.grad().end());
    for (std::size_t i = 0; i < leaf.numel(); ++i) {
      const double saved = leaf[i];
      leaf[i] = saved + h;
      const double up = evaluate(f);
      leaf[i] = saved - h;
      const double down = evaluate(f);
      leaf[i] = saved;

      const double numeric = (up - down) / (2.0 * h);
      if (!std::isfinite(numeric)) throw NumericError("grad_check: non-finite finite difference");
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
      const double err = std::abs(analytic[i] - numeric) / denom;
      ++report.checked;
      if (err > report.max_rel_error || report.checked == 1) {
        report.max_rel_error = err;
        report.worst_leaf = li;
        report.worst_index = i;
        report.analytic = analytic[i];
        report.numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace sahg::ad
