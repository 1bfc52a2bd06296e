#include "rotor/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rotor {

void ModelParams::validate() const {
  if (L < 2) {
    throw std::invalid_argument("ModelParams: L must be >= 2, got " +
                                std::to_string(L));
  }
  if (n_max < 1) {
    throw std::invalid_argument("ModelParams: n_max must be >= 1, got " +
                                std::to_string(n_max));
  }
  for (double c : {ej, ej1, ej2, eg, eps}) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("ModelParams: non-finite coupling in " +
                                  describe());
    }
  }
  if (ej < 0 || ej1 < 0 || ej2 < 0) {
    throw std::invalid_argument(
        "ModelParams: Josephson couplings must be >= 0 in " + describe());
  }
}

std::string ModelParams::describe() const {
  std::ostringstream os;
  os << "L=" << L << " n_max=" << n_max << " ej=" << ej << " ej1=" << ej1
     << " ej2=" << ej2 << " eg=" << eg << " eps=" << eps
     << " bc=" << (bc == Boundary::open ? "open" : "periodic");
  return os.str();
}

}  // namespace rotor
