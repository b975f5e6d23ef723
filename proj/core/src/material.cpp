#include "slidemesh/material.hpp"

#include <cmath>
#include <string>

namespace slidemesh {

Mat2 strain_rate(const Mat2& grad_u) { return 0.5 * (grad_u + grad_u.transpose()); }

double shear_rate(const Mat2& grad_u) {
  const Mat2 eps = strain_rate(grad_u);
  return std::sqrt(2.0 * eps.cwiseProduct(eps).sum());
}

double viscous_dissipation(const Mat2& grad_u, double eta) {
  const Mat2 eps = strain_rate(grad_u);
  // grad u : eps equals eps : eps because the spin tensor is orthogonal to eps.
  return 2.0 * eta * grad_u.cwiseProduct(eps).sum();
}

Mat2 cauchy_stress(const Mat2& grad_u, double p, double eta) {
  return -p * Mat2::Identity() + 2.0 * eta * strain_rate(grad_u);
}

MaterialModel MaterialModel::newtonian(double eta) {
  if (!(eta > 0.0)) throw ConfigError("material: Newtonian viscosity must be positive");
  MaterialModel m;
  m.kind_ = Kind::Newtonian;
  m.eta_ = eta;
  return m;
}

MaterialModel MaterialModel::carreau(const CarreauParams& params) {
  if (!(params.eta0 > 0.0) || params.eta_inf < 0.0 || params.eta0 < params.eta_inf) {
    throw ConfigError("material: Carreau requires eta0 >= etaInf >= 0 and eta0 > 0");
  }
  if (!(params.lambda > 0.0) || !(params.n > 0.0)) {
    throw ConfigError("material: Carreau requires lambda > 0 and n > 0");
  }
  MaterialModel m;
  m.kind_ = Kind::Carreau;
  m.carreau_ = params;
  return m;
}

MaterialModel MaterialModel::cross_wlf(const CrossWlfParams& params) {
  if (!(params.D1 > 0.0) || !(params.tau_star > 0.0)) {
    throw ConfigError("material: Cross-WLF requires D1 > 0 and tauStar > 0");
  }
  if (!(params.n > 0.0 && params.n < 1.0) || !(params.A2 > 0.0)) {
    throw ConfigError("material: Cross-WLF requires 0 < n < 1 and A2 > 0");
  }
  MaterialModel m;
  m.kind_ = Kind::CrossWlf;
  m.cross_wlf_ = params;
  return m;
}

double MaterialModel::viscosity(double gamma_dot, double T) const {
  const double g = std::abs(gamma_dot);
  switch (kind_) {
    case Kind::Newtonian:
      return eta_;
    case Kind::Carreau: {
      const auto& p = carreau_;
      const double x = p.lambda * g;
      return p.eta_inf + (p.eta0 - p.eta_inf) * std::pow(1.0 + x * x, 0.5 * (p.n - 1.0));
    }
    case Kind::CrossWlf: {
      const auto& p = cross_wlf_;
      const double dT = T - p.T_ref;
      if (!(dT > -p.A2 + 1.0)) {
        throw MaterialRangeError("material: temperature " + std::to_string(T) +
                                 " outside the WLF window (T - Tref must exceed " +
                                 std::to_string(-p.A2 + 1.0) + ")");
      }
      const double eta0 = p.D1 * std::exp(-p.A1 * dT / (p.A2 + dT));
      return eta0 / (1.0 + std::pow(eta0 * g / p.tau_star, 1.0 - p.n));
    }
  }
  throw ConfigError("material: unknown model kind");
}

}  // namespace slidemesh
