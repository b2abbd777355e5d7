#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>

namespace confdim {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.template convert_to<double>(); }

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

// Canonical "p/q" (or "p" when q == 1). Used by every serializer so that
// cache files are byte-stable.
std::string rat_to_string(const Rat& r);

// Accepts "p/q", integers and finite decimals ("0.25" -> 1/4). Throws on junk.
Rat rat_parse(const std::string& s);

// Exact value of the double (doubles are dyadic rationals).
Rat rat_from_double(double v);

// Exact n-th root if it exists.
std::optional<Int> int_nth_root_exact(const Int& v, unsigned n);
std::optional<Rat> rat_nth_root_exact(const Rat& v, unsigned n);

// r^(num/den) when exactly representable as a rational.
std::optional<Rat> rat_pow_exact(const Rat& base, const Rat& exponent);

// FNV-1a, used for content keys of IFS specs and cache filenames.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace confdim
