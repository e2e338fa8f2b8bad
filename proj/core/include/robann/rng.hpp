#pragma once

#include <cstdint>
#include <string_view>

namespace robann {

// Counter-based splittable generator. Every random word is a pure function
// of (seed, stream, counter), so any experiment replays bit-exactly from a
// single 64-bit master seed and a stream id. Streams never share state;
// handing a copy of an RngStream to two consumers is the only way to get
// correlated draws, so split() or derive_stream() fresh streams instead.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream), counter_(0) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_word() { return word_at(seed_, stream_, counter_++); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_word() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1); never returns either endpoint.
  double next_double_open() {
    return (static_cast<double>(next_word() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform in [0, bound); unbiased via rejection. bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t w = next_word();
      if (w >= threshold) return w % bound;
    }
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Child stream decorrelated from this one; advances this stream by one word.
  RngStream split(std::uint64_t tag) {
    return RngStream(next_word(), mix(stream_ ^ mix(tag)));
  }

  static std::uint64_t word_at(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t counter) {
    std::uint64_t h = mix(seed + kGamma);
    h = mix(h ^ mix(stream + 2 * kGamma));
    h = mix(h ^ mix(counter + 3 * kGamma));
    return h;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  // splitmix64 finalizer; full avalanche on 64-bit words.
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_;
};

// Stable stream ids for the (master seed, purpose tag, ordinal) contract.
inline std::uint64_t stream_id(std::string_view tag, std::uint64_t ordinal) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag bytes
  for (const char ch : tag) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h ^ (ordinal * 0x9e3779b97f4a7c15ULL);
}

inline RngStream derive_stream(std::uint64_t seed, std::string_view tag,
                               std::uint64_t ordinal = 0) {
  return RngStream(seed, stream_id(tag, ordinal));
}

}  // namespace robann
