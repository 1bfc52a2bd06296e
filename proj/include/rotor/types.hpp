#pragma once

#include <complex>

namespace rotor {

using cplx = std::complex<double>;

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rotor
