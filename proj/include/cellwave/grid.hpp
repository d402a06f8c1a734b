#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cellwave {

/// Uniform periodic grid on [-L/2, L/2) with n cells of width h = L/n.
class Grid1D {
 public:
  Grid1D() = default;
  Grid1D(double length, std::size_t n_points);  // throws ConfigError unless L > 0, n >= 8

  double length() const { return length_; }
  std::size_t size() const { return n_; }
  double h() const { return length_ / static_cast<double>(n_); }
  double x(std::size_t k) const { return -0.5 * length_ + static_cast<double>(k) * h(); }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double length_ = 1.0;
  std::size_t n_ = 8;
};

/// Concentration fields of all species at one time. Storage is species-major:
/// values[s * n + k].
struct FieldState {
  double time = 0.0;
  std::size_t species = 0;
  std::size_t n = 0;
  std::vector<double> values;

  FieldState() = default;
  FieldState(std::size_t n_species, std::size_t n_points, double t = 0.0)
      : time(t), species(n_species), n(n_points), values(n_species * n_points, 0.0) {}

  std::span<double> field(std::size_t s) { return {values.data() + s * n, n}; }
  std::span<const double> field(std::size_t s) const { return {values.data() + s * n, n}; }
};

}  // namespace cellwave
