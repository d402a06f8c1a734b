#include "cellwave/stepper.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "cellwave/error.hpp"
#include "cellwave/rng.hpp"

namespace cellwave {

namespace {

constexpr std::size_t kBlock = BlockProgram::kBlock;

// Per-cell arithmetic shared by the blocked and the reference paths. R points
// at propensity 0 of the cell; successive reactions are `stride` apart.
inline double drift(const int* srow, const double* R, std::size_t stride, std::size_t nr) {
  double f = 0.0;
  for (std::size_t j = 0; j < nr; ++j)
    if (srow[j] != 0) f += srow[j] * R[j * stride];
  return f;
}

inline double form_a(const int* srow, const double* R, std::size_t stride, std::size_t nr,
                     const double* z, double scale) {
  double g = 0.0;
  for (std::size_t j = 0; j < nr; ++j)
    if (srow[j] != 0) g += srow[j] * std::sqrt(std::max(0.0, R[j * stride])) * (z[j] * scale);
  return g;
}

inline double form_b(const int* srow, const double* R, std::size_t stride, std::size_t nr, double z,
                     double scale) {
  double var = 0.0;
  for (std::size_t j = 0; j < nr; ++j)
    if (srow[j] != 0) var += static_cast<double>(srow[j] * srow[j]) * std::max(0.0, R[j * stride]);
  return std::sqrt(var) * (z * scale);
}

inline double edge_flux(double diffusion, double left, double right, double z, double scale) {
  return std::sqrt(2.0 * diffusion * std::max(0.0, 0.5 * (left + right))) * (z * scale);
}

}  // namespace

Stepper::Stepper(const ReactionNetwork& net, const Grid1D& grid, double dt, NoiseConfig noise)
    : net_(&net),
      grid_(grid),
      dt_(dt),
      noise_(noise),
      m_(net.species_count()),
      r_(net.reaction_count()),
      n_(grid.size()),
      noise_scale_(std::sqrt(dt / grid.h())) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive");
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) throw ConfigError("sigma must be >= 0");
  if (m_ == 0) throw ConfigError("network has no species");
  diffusion_ = net.diffusion_coefficients();
  const double h2 = grid.h() * grid.h();
  for (double d : diffusion_) {
    const double r = dt * d / h2;
    solvers_.emplace_back(n_, 1.0 + 2.0 * r, -r);
  }
  stoich_.resize(m_ * r_);
  for (std::size_t s = 0; s < m_; ++s)
    for (std::size_t j = 0; j < r_; ++j) stoich_[s * r_ + j] = net.stoich(s, j);

  switch (noise_.variant) {
    case NoiseVariant::None: break;
    case NoiseVariant::FullCleFormA:
      channels_ = r_;
      diffusion_noise_ = true;
      break;
    case NoiseVariant::FullCleFormB:
    case NoiseVariant::CleNoDiffusionNoise:
      if (!net.noise_covariance_diagonal())
        throw ModelError("form B noise needs a diagonal S diag(R) S^T; use form A");
      channels_ = m_;
      diffusion_noise_ = noise_.variant == NoiseVariant::FullCleFormB;
      break;
    case NoiseVariant::AdditiveWhiteU:
      channels_ = 1;
      additive_species_ = 0;
      for (std::size_t s = 0; s < m_; ++s)
        if (net.species()[s].name == "u") additive_species_ = s;
      break;
  }
  rhs_.resize(m_ * n_);
  flux_.resize(m_ * n_);
}

std::uint64_t Stepper::draws_per_step() const {
  if (noise_.silent()) return 0;
  return n_ * channels_ + (diffusion_noise_ ? n_ * m_ : 0);
}

void Stepper::step(std::span<double> x, std::uint64_t step, double time) {
  const bool noisy = !noise_.silent();
  const BlockProgram& prog = net_->block_program();
  const std::size_t nblocks = (n_ + kBlock - 1) / kBlock;
  const double sigma = noise_.sigma;
  const std::size_t C = channels_;

#pragma omp parallel
  {
    std::vector<double> regs(std::max<std::size_t>(1, prog.register_count()) * kBlock);
    std::vector<double> R(std::max<std::size_t>(1, r_) * kBlock);
    std::vector<double> z(std::max(C, m_) * kBlock);
    std::vector<const double*> in(m_);
    std::vector<double*> out(r_);

#pragma omp for schedule(static)
    for (std::size_t b = 0; b < nblocks; ++b) {
      const std::size_t k0 = b * kBlock;
      const std::size_t count = std::min(kBlock, n_ - k0);
      for (std::size_t s = 0; s < m_; ++s) in[s] = x.data() + s * n_ + k0;
      for (std::size_t j = 0; j < r_; ++j) out[j] = R.data() + j * kBlock;
      if (r_ > 0) prog.run(in, out, count, regs);
      if (noisy && C > 0) fill_normals(noise_.seed, step, k0 * C, {z.data(), count * C});

      for (std::size_t s = 0; s < m_; ++s) {
        const int* srow = stoich_.data() + s * r_;
        for (std::size_t c = 0; c < count; ++c) {
          const std::size_t k = k0 + c;
          double v = x[s * n_ + k] + dt_ * drift(srow, R.data() + c, kBlock, r_);
          if (noisy) {
            switch (noise_.variant) {
              case NoiseVariant::FullCleFormA:
                v += sigma * form_a(srow, R.data() + c, kBlock, r_, z.data() + c * C, noise_scale_);
                break;
              case NoiseVariant::FullCleFormB:
              case NoiseVariant::CleNoDiffusionNoise:
                v += sigma * form_b(srow, R.data() + c, kBlock, r_, z[c * C + s], noise_scale_);
                break;
              case NoiseVariant::AdditiveWhiteU:
                if (s == additive_species_) v += sigma * (z[c] * noise_scale_);
                break;
              case NoiseVariant::None: break;
            }
          }
          rhs_[s * n_ + k] = v;
        }
      }

      if (noisy && diffusion_noise_) {
        fill_normals(noise_.seed, step, n_ * C + k0 * m_, {z.data(), count * m_});
        for (std::size_t c = 0; c < count; ++c) {
          const std::size_t k = k0 + c;
          const std::size_t k1 = k + 1 == n_ ? 0 : k + 1;
          for (std::size_t s = 0; s < m_; ++s)
            flux_[s * n_ + k] =
                edge_flux(diffusion_[s], x[s * n_ + k], x[s * n_ + k1], z[c * m_ + s], noise_scale_);
        }
      }
    }

    if (noisy && diffusion_noise_) {
      const double h = grid_.h();
#pragma omp for schedule(static)
      for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t km = k == 0 ? n_ - 1 : k - 1;
        for (std::size_t s = 0; s < m_; ++s)
          rhs_[s * n_ + k] += sigma * (flux_[s * n_ + k] - flux_[s * n_ + km]) / h;
      }
    }
  }
  std::copy(rhs_.begin(), rhs_.end(), x.begin());
  solve_and_finish(x, time);
}

void Stepper::step_reference(std::span<double> x, std::uint64_t step, double time) {
  const bool noisy = !noise_.silent();
  const double sigma = noise_.sigma;
  const std::size_t C = channels_;
  std::vector<double> cell(m_), R(r_), z(std::max<std::size_t>(C, 1));

  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t s = 0; s < m_; ++s) cell[s] = x[s * n_ + k];
    net_->evaluate_propensities(cell, R);
    if (noisy)
      for (std::size_t c = 0; c < C; ++c) z[c] = normal_draw(noise_.seed, step, k * C + c);
    for (std::size_t s = 0; s < m_; ++s) {
      const int* srow = stoich_.data() + s * r_;
      double v = cell[s] + dt_ * drift(srow, R.data(), 1, r_);
      if (noisy) {
        switch (noise_.variant) {
          case NoiseVariant::FullCleFormA:
            v += sigma * form_a(srow, R.data(), 1, r_, z.data(), noise_scale_);
            break;
          case NoiseVariant::FullCleFormB:
          case NoiseVariant::CleNoDiffusionNoise:
            v += sigma * form_b(srow, R.data(), 1, r_, z[s], noise_scale_);
            break;
          case NoiseVariant::AdditiveWhiteU:
            if (s == additive_species_) v += sigma * (z[0] * noise_scale_);
            break;
          case NoiseVariant::None: break;
        }
      }
      rhs_[s * n_ + k] = v;
    }
  }
  if (noisy && diffusion_noise_) {
    for (std::size_t e = 0; e < n_; ++e) {
      const std::size_t e1 = e + 1 == n_ ? 0 : e + 1;
      for (std::size_t s = 0; s < m_; ++s) {
        const double zz = normal_draw(noise_.seed, step, n_ * C + e * m_ + s);
        flux_[s * n_ + e] = edge_flux(diffusion_[s], x[s * n_ + e], x[s * n_ + e1], zz, noise_scale_);
      }
    }
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t km = k == 0 ? n_ - 1 : k - 1;
      for (std::size_t s = 0; s < m_; ++s)
        rhs_[s * n_ + k] += sigma * (flux_[s * n_ + k] - flux_[s * n_ + km]) / grid_.h();
    }
  }
  std::copy(rhs_.begin(), rhs_.end(), x.begin());
  solve_and_finish(x, time);
}

void Stepper::solve_and_finish(std::span<double> x, double time) {
  for (std::size_t s = 0; s < m_; ++s) solvers_[s].solve(x.subspan(s * n_, n_));
  const bool clamp = !noise_.silent();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw NumericalError(time + dt_, i % n_, "non-finite value in species " +
                                                                           net_->species()[i / n_].name);
    if (clamp && x[i] < 0.0) x[i] = 0.0;
  }
}

}  // namespace cellwave
