#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cellwave/network.hpp"

namespace cellwave {

enum class Stability { StableNode, StableFocus, UnstableFocus, UnstableNode, Saddle, Marginal };

std::string_view stability_name(Stability s);

using Eigenpair = std::array<std::complex<double>, 2>;
using Matrix2 = std::array<std::array<double, 2>, 2>;

struct BackgroundState {
  double u_star = 0.0;
  double v_star = 0.0;
  Eigenpair eigenvalues{};
  Stability classification = Stability::Marginal;
  int multiplicity = 1;  // 2 for a tangential (double) root of the quartic
};

/// Coefficients {c0, c1, c2, c3, c4} of the background-state quartic in u.
std::array<double, 5> background_quartic(const ModelParameters& p);

/// Every non-negative background state, sorted by u*. Parameters need only be
/// positive except a5, which may be zero (the origin then becomes a state).
std::vector<BackgroundState> background_states(const ModelParameters& p);

enum class JacobianForm {
  Analytic,  // d/du of the Hill term enters with a plus sign
  Printed,   // the alternative sign on the Hill derivative, kept for comparison
};

Matrix2 jacobian(const ModelParameters& p, double u, double v,
                 JacobianForm form = JacobianForm::Analytic);

/// Closed-form eigenvalues of a 2x2 matrix; ordered by descending real part,
/// then descending imaginary part.
Eigenpair eigenvalues(const Matrix2& m);

/// Strict classification with |Re| <= 1e-9 counted as marginal.
Stability classify(const Eigenpair& ev, double tol = 1e-9);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
};

struct HopfScanRow {
  double c1 = 0.0;
  std::vector<BackgroundState> states;
};

struct HopfScan {
  std::vector<HopfScanRow> rows;
  std::optional<Bracket> real_to_complex;  // discriminant of J changes sign
  std::optional<Bracket> hopf;             // Re(lambda) changes sign on a complex pair
};

/// Scan c1 over [c1_lo, c1_hi] in `steps` intervals (steps == 0 gives a single
/// row). Transitions are tracked on the smallest background state and refined
/// by bisection to `tol`.
HopfScan hopf_scan(ModelParameters p, double c1_lo, double c1_hi, std::size_t steps,
                   double tol = 1e-4, JacobianForm form = JacobianForm::Analytic);

struct NullclineSample {
  double u = 0.0;
  double v_on_u_nullcline = 0.0;
  double v_on_v_nullcline = 0.0;
};

/// Both nullclines sampled as v(u); throws ConfigError for u <= 0.
std::vector<NullclineSample> nullclines(const ModelParameters& p, std::span<const double> u_grid);

/// Columns c1,u_star,v_star,re_lambda1,im_lambda1,re_lambda2,im_lambda2,class;
/// one line per state.
void write_scan_csv(std::ostream& os, const HopfScan& scan);

}  // namespace cellwave
