#include "selfnorm/rng.hpp"

namespace selfnorm {
namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, const std::uint64_t* key,
                              std::size_t key_len) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * key_len + 1);
  words.push_back(static_cast<std::uint32_t>(seed));
  words.push_back(static_cast<std::uint32_t>(seed >> 32));
  for (std::size_t i = 0; i < key_len; ++i) {
    words.push_back(static_cast<std::uint32_t>(key[i]));
    words.push_back(static_cast<std::uint32_t>(key[i] >> 32));
  }
  // key length goes in last so that {k} and {k, 0} differ
  words.push_back(static_cast<std::uint32_t>(key_len));
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed,
                           std::initializer_list<std::uint64_t> key)
    : engine_(seeded_engine(seed, key.begin(), key.size())) {}

RandomStream::RandomStream(std::uint64_t seed,
                           const std::vector<std::uint64_t>& key)
    : engine_(seeded_engine(seed, key.data(), key.size())) {}

}  // namespace selfnorm
