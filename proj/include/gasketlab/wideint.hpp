// wideint.hpp -- arbitrary-precision integers for level products and vertex keys.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace gasketlab {

using WideInt = boost::multiprecision::cpp_int;

inline double to_double(const WideInt& v) { return v.convert_to<double>(); }

} // namespace gasketlab
