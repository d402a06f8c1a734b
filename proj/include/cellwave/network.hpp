#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cellwave/expr.hpp"

namespace cellwave {

struct Species {
  std::string name;
  double diffusion = 0.0;  // length^2 / time

  friend bool operator==(const Species&, const Species&) = default;
};

struct Reaction {
  Expr propensity;
  std::vector<int> stoichiometry;  // one entry per species, network order

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

/// Parameters of the two-species activator/inhibitor model.
struct ModelParameters {
  double a1 = 0.167;
  double a2 = 16.67;
  double a3 = 167.0;
  double a4 = 1.44;
  double a5 = 1.47;
  double eps = 0.52;
  double c1 = 0.1;
  double c2 = 3.9;
  double Du = 0.1;
  double Dv = 1.0;

  /// Throws ModelError unless every value is strictly positive and finite.
  void validate() const;

  static ModelParameters baseline() { return {}; }
  /// Wild-type cell preset.
  static ModelParameters wild_type();
  /// PTEN-null cell preset.
  static ModelParameters pten_null();

  friend bool operator==(const ModelParameters&, const ModelParameters&) = default;
};

/// Species, reactions (propensity + stoichiometry) and named parameters.
/// Immutable after construction; every symbol used by a propensity must
/// resolve to a species or a parameter.
class ReactionNetwork {
 public:
  ReactionNetwork() = default;
  ReactionNetwork(std::vector<Species> species, std::vector<Reaction> reactions,
                  std::map<std::string, double> parameters);

  const std::vector<Species>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const std::map<std::string, double>& parameters() const { return parameters_; }

  std::size_t species_count() const { return species_.size(); }
  std::size_t reaction_count() const { return reactions_.size(); }
  std::size_t species_index(const std::string& name) const;  // throws ModelError
  int stoich(std::size_t species, std::size_t reaction) const {
    return reactions_[reaction].stoichiometry[species];
  }
  std::vector<double> diffusion_coefficients() const;

  /// Propensities R(X) in reaction order. Negative values are passed through.
  std::vector<double> evaluate_propensities(std::span<const double> state) const;
  void evaluate_propensities(std::span<const double> state, std::span<double> out) const;

  /// S * R(X).
  std::vector<double> drift(std::span<const double> state) const;

  /// True when S diag(R) S^T is diagonal for every R, i.e. no reaction
  /// changes more than one species.
  bool noise_covariance_diagonal() const { return covariance_diagonal_; }

  /// Vectorised propensity evaluation over grid blocks (species are inputs).
  const BlockProgram& block_program() const { return program_; }

  friend bool operator==(const ReactionNetwork& a, const ReactionNetwork& b) {
    return a.species_ == b.species_ && a.reactions_ == b.reactions_ &&
           a.parameters_ == b.parameters_;
  }

 private:
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::map<std::string, double> parameters_;
  std::vector<BoundExpr> bound_;
  BlockProgram program_;
  bool covariance_diagonal_ = true;
};

/// The six-reaction activator (u) / inhibitor (v) network.
ReactionNetwork builtin_bhatt_model(const ModelParameters& params);

/// Recover the named model parameters a1..a5, eps, c1, c2 and the diffusion
/// of species u and v; throws ModelError if any is missing.
ModelParameters bhatt_parameters(const ReactionNetwork& net);

}  // namespace cellwave
