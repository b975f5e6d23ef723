#pragma once

#include <functional>

#include "slidemesh/errors.hpp"
#include "slidemesh/types.hpp"

namespace slidemesh {

/// Rate-of-deformation tensor eps = (grad u + grad u^T) / 2.
Mat2 strain_rate(const Mat2& grad_u);

/// Scalar shear rate sqrt(2 eps : eps).
double shear_rate(const Mat2& grad_u);

/// Viscous dissipation 2 eta (grad u : eps); non-negative for eta >= 0.
double viscous_dissipation(const Mat2& grad_u, double eta);

/// Cauchy stress -p I + 2 eta eps.
Mat2 cauchy_stress(const Mat2& grad_u, double p, double eta);

struct CarreauParams {
  double eta0 = 0.0;
  double eta_inf = 0.0;
  double lambda = 0.0;
  double n = 1.0;
};

struct CrossWlfParams {
  double D1 = 0.0;
  double tau_star = 0.0;
  double n = 1.0;
  double A1 = 0.0;
  double A2 = 0.0;  // Kelvin
  double T_ref = 0.0;
};

/// Generalized Newtonian viscosity law eta(shear_rate, T).
class MaterialModel {
 public:
  enum class Kind { Newtonian, Carreau, CrossWlf };

  static MaterialModel newtonian(double eta);
  static MaterialModel carreau(const CarreauParams& params);
  static MaterialModel cross_wlf(const CrossWlfParams& params);

  double viscosity(double gamma_dot, double T = 0.0) const;
  Kind kind() const { return kind_; }
  bool depends_on_temperature() const { return kind_ == Kind::CrossWlf; }

  const CarreauParams& carreau_params() const { return carreau_; }
  const CrossWlfParams& cross_wlf_params() const { return cross_wlf_; }

 private:
  MaterialModel() = default;

  Kind kind_ = Kind::Newtonian;
  double eta_ = 0.0;
  CarreauParams carreau_;
  CrossWlfParams cross_wlf_;
};

/// Bulk constants shared by all models of a subdomain.
struct PhysicalParams {
  double rho = 1.0;
  double cp = 1.0;
  double kappa = 1.0;
  /// Body force per unit mass as a field; unset means zero.
  std::function<Vec2(const Vec2&)> body_force;

  Vec2 body_force_at(const Vec2& x) const {
    return body_force ? body_force(x) : Vec2(Vec2::Zero());
  }
};

}  // namespace slidemesh
