#include "adanorm/rng.hpp"

namespace adanorm {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0xd1b54a32d192ed03ULL));
}

CounterRng::result_type CounterRng::at(std::uint64_t counter) const {
  return mix64(key_ + counter * 0x9e3779b97f4a7c15ULL);
}

std::size_t CounterRng::uniform_index(std::size_t n) {
  const unsigned __int128 wide =
      static_cast<unsigned __int128>((*this)()) * static_cast<unsigned __int128>(n);
  return static_cast<std::size_t>(wide >> 64);
}

double CounterRng::uniform01() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

}  // namespace adanorm
