// rational.hpp -- exact rational arithmetic for resistance computations.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace gasketlab {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& v) { return v.convert_to<double>(); }

} // namespace gasketlab
