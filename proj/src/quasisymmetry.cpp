#include "confdim/quasisymmetry.hpp"

#include <cmath>

namespace confdim {

void QuasisymmetryProfile::check() const {
  if (coefficient <= 0 || exponent <= 0)
    throw std::invalid_argument("profile needs positive coefficient and exponent");
}

double QuasisymmetryProfile::eval(double t) const {
  if (t < 0) throw std::invalid_argument("profile argument must be nonnegative");
  if (t == 0) return 0;
  return to_double(coefficient) * std::pow(t, to_double(exponent));
}

std::optional<Rat> QuasisymmetryProfile::eval_exact(const Rat& t) const {
  if (t < 0) return std::nullopt;
  if (t == 0) return Rat(0);
  auto p = rat_pow_exact(t, exponent);
  if (!p) return std::nullopt;
  return coefficient * *p;
}

QuasisymmetryProfile QuasisymmetryProfile::inverse_profile() const {
  check();
  Rat inv_alpha = Rat(1) / exponent;
  auto c = rat_pow_exact(coefficient, inv_alpha);
  if (!c)
    throw std::domain_error("inverse profile coefficient not rational; use eval on the formula");
  return QuasisymmetryProfile{*c, inv_alpha};
}

}  // namespace confdim
