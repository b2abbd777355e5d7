#pragma once

#include "confdim/geometry.hpp"

namespace confdim {

// Power-type distortion profile eta(t) = C * t^alpha, the gauge of a
// quasisymmetry. eta(0) = 0 and eta is strictly increasing for C, alpha > 0.
struct QuasisymmetryProfile {
  Rat coefficient = 1;  // C
  Rat exponent = 1;     // alpha

  void check() const;

  double eval(double t) const;
  std::optional<Rat> eval_exact(const Rat& t) const;

  // Profile of the inverse map: eta~(t) = (eta^-1(t^-1))^-1 = C^(1/alpha) t^(1/alpha).
  QuasisymmetryProfile inverse_profile() const;

  // eta of the identity map (X,d) -> (X,d^theta).
  static QuasisymmetryProfile snowflake_profile(const Rat& theta) {
    return QuasisymmetryProfile{1, theta};
  }
};

}  // namespace confdim
