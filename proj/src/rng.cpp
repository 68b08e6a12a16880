#include "qnn/rng.hpp"

namespace qnn::rng {

StreamKey derive(std::uint64_t seed, Purpose purpose, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(seed ^ kGamma);
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  for (std::uint64_t c : coords) {
    h = mix64(h + kGamma + mix64(c + 0x632be59bd9b4e019ull));
  }
  return StreamKey{h};
}

}  // namespace qnn::rng
