#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cellwave {

/// Solves the circulant tridiagonal system with `diag` on the main diagonal and
/// `off` on both off-diagonals including the wraparound corners
/// (Thomas sweep plus a Sherman-Morrison correction). Factorised once.
class CyclicTridiagonal {
 public:
  CyclicTridiagonal() = default;
  CyclicTridiagonal(std::size_t n, double diag, double off);  // n >= 3

  std::size_t size() const { return n_; }
  double diag() const { return diag_; }
  double off() const { return off_; }

  /// In place: rhs becomes the solution.
  void solve(std::span<double> rhs) const;

 private:
  std::size_t n_ = 0;
  double diag_ = 1.0;
  double off_ = 0.0;
  double gamma_ = 0.0;
  std::vector<double> cprime_;   // modified super-diagonal
  std::vector<double> inv_den_;  // 1 / pivot
  std::vector<double> z_;        // B^{-1} u
  double z_factor_ = 0.0;        // 1 / (1 + v.z)
};

}  // namespace cellwave
