#ifndef DFL_SEEDING_HPP
#define DFL_SEEDING_HPP

#include <cstdint>
#include <string_view>

namespace dfl {

/// Independent child seed for a named stream (splitmix64 over seed and an FNV-1a tag hash).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t tag = 0xcbf29ce484222325ULL;
  for (char ch : stream) {
    tag ^= static_cast<unsigned char>(ch);
    tag *= 0x100000001b3ULL;
  }
  std::uint64_t z = seed ^ (tag + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace dfl

#endif  // DFL_SEEDING_HPP
