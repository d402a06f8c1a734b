#include "cellwave/tridiag.hpp"

#include <cmath>

#include "cellwave/error.hpp"

namespace cellwave {

CyclicTridiagonal::CyclicTridiagonal(std::size_t n, double diag, double off)
    : n_(n), diag_(diag), off_(off) {
  if (n < 3) throw ConfigError("cyclic tridiagonal system needs n >= 3");
  if (off == 0.0) {
    if (diag == 0.0) throw NumericalError(0.0, 0, "singular diagonal system");
    return;
  }
  // B = A - u v^T with u = (gamma, 0.., off), v = (1, 0.., off/gamma)
  gamma_ = -diag;
  std::vector<double> b(n, diag);
  b[0] = diag - gamma_;
  b[n - 1] = diag - off * off / gamma_;
  cprime_.assign(n, 0.0);
  inv_den_.assign(n, 0.0);
  double den = b[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) den = b[i] - off * cprime_[i - 1];
    if (den == 0.0 || !std::isfinite(den)) throw NumericalError(0.0, i, "singular tridiagonal pivot");
    inv_den_[i] = 1.0 / den;
    cprime_[i] = off * inv_den_[i];
  }
  z_.assign(n, 0.0);
  z_[0] = gamma_;
  z_[n - 1] = off;
  // solve B z = u without the correction
  z_[0] *= inv_den_[0];
  for (std::size_t i = 1; i < n; ++i) z_[i] = (z_[i] - off * z_[i - 1]) * inv_den_[i];
  for (std::size_t i = n - 1; i-- > 0;) z_[i] -= cprime_[i] * z_[i + 1];
  const double vz = z_[0] + off * z_[n - 1] / gamma_;
  if (1.0 + vz == 0.0) throw NumericalError(0.0, 0, "singular cyclic system");
  z_factor_ = 1.0 / (1.0 + vz);
}

void CyclicTridiagonal::solve(std::span<double> x) const {
  const std::size_t n = n_;
  if (off_ == 0.0) {
    if (diag_ != 1.0)
      for (double& v : x) v /= diag_;
    return;
  }
  const double off = off_;
  x[0] *= inv_den_[0];
  for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - off * x[i - 1]) * inv_den_[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= cprime_[i] * x[i + 1];
  const double fact = (x[0] + off * x[n - 1] / gamma_) * z_factor_;
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z_[i];
}

}  // namespace cellwave
