#include "rrmc/pcg.hpp"

namespace rrmc {

uint128 modular_inverse(uint128 a, unsigned bits) {
  if (bits == 0 || bits > 128) {
    throw std::invalid_argument("modular_inverse: bit width must be in [1, 128]");
  }
  const uint128 mask = bits == 128 ? ~uint128{0} : ((uint128{1} << bits) - 1);
  // The inverse modulo 2^128 reduces to the inverse modulo any smaller power of two.
  return modular_inverse<uint128>(a & mask) & mask;
}

}  // namespace rrmc
