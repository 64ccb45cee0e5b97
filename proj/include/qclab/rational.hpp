#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace qclab {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Error taxonomy shared across the library.  The CLI maps these onto exit
// codes; tests assert on the concrete types.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArityError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct BudgetError : Error {
  using Error::Error;
};
// Conditioning a distribution on a subcube carrying zero mass.
struct ConditioningError : Error {
  using Error::Error;
};
struct PairError : Error {
  using Error::Error;
};
struct ConsistencyError : Error {
  using Error::Error;
};
struct FullnessError : Error {
  using Error::Error;
};
struct SeparationError : Error {
  using Error::Error;
};
struct StructureError : Error {
  using Error::Error;
};
// Internal invariant violation; indicates a bug, not bad input.
struct DefectError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct InfeasibleError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};

inline const Rat& rat_min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline const Rat& rat_max(const Rat& a, const Rat& b) { return a > b ? a : b; }
inline Rat rat_abs(const Rat& a) { return a < 0 ? Rat(-a) : a; }

/// Canonical "p/q" form with q > 0, gcd(p,q) = 1 (e.g. "3/2", "-1/3", "0/1").
inline std::string rat_str(const Rat& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Parses "p/q" or a bare integer "p".
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw ParseError("rational with zero denominator: " + s);
    return Rat(num, den);
  } catch (const std::exception&) {
    throw ParseError("malformed rational: " + s);
  }
}

inline double rat_double(const Rat& r) { return r.convert_to<double>(); }

inline BigInt rat_ceil(const Rat& r) {
  BigInt q = numerator(r) / denominator(r);
  if (q * denominator(r) < numerator(r)) ++q;
  return q;
}

}  // namespace qclab
