#include "cellwave/network.hpp"

#include <cmath>
#include <set>

#include "cellwave/error.hpp"

namespace cellwave {

void ModelParameters::validate() const {
  const std::pair<const char*, double> all[] = {{"a1", a1}, {"a2", a2}, {"a3", a3}, {"a4", a4},
                                                {"a5", a5}, {"eps", eps}, {"c1", c1},
                                                {"c2", c2}, {"Du", Du}, {"Dv", Dv}};
  for (const auto& [name, value] : all)
    if (!(value > 0.0) || !std::isfinite(value))
      throw ModelError(std::string("model parameter ") + name + " must be positive");
}

ModelParameters ModelParameters::wild_type() {
  ModelParameters p;
  p.a3 = 167.0;
  p.c2 = 2.1;
  p.eps = 0.4;
  p.c1 = 0.1;
  return p;
}

ModelParameters ModelParameters::pten_null() {
  ModelParameters p;
  p.a3 = 300.6;
  p.c2 = 3.0;
  p.eps = 0.4;
  p.c1 = 0.1;
  return p;
}

ReactionNetwork::ReactionNetwork(std::vector<Species> species, std::vector<Reaction> reactions,
                                 std::map<std::string, double> parameters)
    : species_(std::move(species)),
      reactions_(std::move(reactions)),
      parameters_(std::move(parameters)) {
  std::map<std::string, std::size_t> slots;
  for (std::size_t i = 0; i < species_.size(); ++i) {
    const Species& s = species_[i];
    if (!(s.diffusion >= 0.0) || !std::isfinite(s.diffusion))
      throw ModelError("species '" + s.name + "' has negative diffusion coefficient");
    if (!slots.emplace(s.name, i).second) throw ModelError("duplicate species '" + s.name + "'");
    if (parameters_.count(s.name))
      throw ModelError("'" + s.name + "' is both a species and a parameter");
  }
  for (const auto& [name, value] : parameters_)
    if (!std::isfinite(value)) throw ModelError("parameter '" + name + "' is not finite");

  std::vector<Expr> exprs;
  for (std::size_t j = 0; j < reactions_.size(); ++j) {
    const Reaction& r = reactions_[j];
    if (r.stoichiometry.size() != species_.size())
      throw ModelError("reaction " + std::to_string(j + 1) + ": stoichiometry has " +
                       std::to_string(r.stoichiometry.size()) + " entries, expected " +
                       std::to_string(species_.size()));
    int touched = 0;
    for (int c : r.stoichiometry) touched += c != 0;
    if (touched == 0)
      throw ModelError("reaction " + std::to_string(j + 1) + " changes no species");
    if (touched > 1) covariance_diagonal_ = false;
    bound_.emplace_back(r.propensity, slots, parameters_);
    exprs.push_back(r.propensity);
  }
  program_ = BlockProgram(exprs, slots, parameters_);
}

std::size_t ReactionNetwork::species_index(const std::string& name) const {
  for (std::size_t i = 0; i < species_.size(); ++i)
    if (species_[i].name == name) return i;
  throw ModelError("unknown species '" + name + "'");
}

std::vector<double> ReactionNetwork::diffusion_coefficients() const {
  std::vector<double> d;
  for (const auto& s : species_) d.push_back(s.diffusion);
  return d;
}

void ReactionNetwork::evaluate_propensities(std::span<const double> state,
                                            std::span<double> out) const {
  for (std::size_t j = 0; j < bound_.size(); ++j) out[j] = bound_[j](state);
}

std::vector<double> ReactionNetwork::evaluate_propensities(std::span<const double> state) const {
  std::vector<double> r(reactions_.size());
  evaluate_propensities(state, r);
  return r;
}

std::vector<double> ReactionNetwork::drift(std::span<const double> state) const {
  const auto r = evaluate_propensities(state);
  std::vector<double> f(species_.size(), 0.0);
  for (std::size_t j = 0; j < reactions_.size(); ++j)
    for (std::size_t i = 0; i < species_.size(); ++i)
      if (const int s = reactions_[j].stoichiometry[i]; s != 0) f[i] += s * r[j];
  return f;
}

ReactionNetwork builtin_bhatt_model(const ModelParameters& p) {
  p.validate();
  const Expr u = Expr::symbol("u");
  const Expr v = Expr::symbol("v");
  auto sym = [](const char* n) { return Expr::symbol(n); };
  const Expr two = Expr::constant(2.0);

  std::vector<Reaction> reactions = {
      {sym("a1") * u, {-1, 0}},
      {sym("a2") * u * v, {-1, 0}},
      {sym("a3") * pow(u, two) / (sym("a4") + pow(u, two)), {1, 0}},
      {sym("a5"), {1, 0}},
      {sym("eps") * sym("c1") * v, {0, -1}},
      {sym("eps") * sym("c2") * u, {0, 1}},
  };
  std::map<std::string, double> params = {{"a1", p.a1}, {"a2", p.a2}, {"a3", p.a3},
                                          {"a4", p.a4}, {"a5", p.a5}, {"eps", p.eps},
                                          {"c1", p.c1}, {"c2", p.c2}};
  return ReactionNetwork({{"u", p.Du}, {"v", p.Dv}}, std::move(reactions), std::move(params));
}

ModelParameters bhatt_parameters(const ReactionNetwork& net) {
  auto get = [&](const char* name) {
    auto it = net.parameters().find(name);
    if (it == net.parameters().end())
      throw ModelError(std::string("network lacks model parameter '") + name + "'");
    return it->second;
  };
  ModelParameters p;
  p.a1 = get("a1");
  p.a2 = get("a2");
  p.a3 = get("a3");
  p.a4 = get("a4");
  p.a5 = get("a5");
  p.eps = get("eps");
  p.c1 = get("c1");
  p.c2 = get("c2");
  p.Du = net.species().at(net.species_index("u")).diffusion;
  p.Dv = net.species().at(net.species_index("v")).diffusion;
  return p;
}

}  // namespace cellwave
