#pragma once
#include <array>
#include <cstdint>

namespace airylab {

// Counter-based random stream (Philox4x64-10). A stream is fully identified
// by (seed, stream_id): the key of the block cipher. Draws depend only on
// that pair and the draw index, never on thread layout or sampling order of
// other streams, so replicas may be scheduled on any number of workers and
// still reproduce bit-identical output.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform on (0,1]; never returns 0 so log() is always safe.
  double uniform01();

  // Standard normal via Box-Muller; second value of each pair is cached.
  double normal();

  // Standard exponential.
  double exponential();

  // Derive an independent stream keyed by up to three tags. Used to give
  // replicas / slabs / components their own streams deterministically.
  RngStream substream(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // One block of the underlying cipher; exposed for known-answer tests.
  static std::array<std::uint64_t, 4> philox4x64_10(std::array<std::uint64_t, 4> counter,
                                                    std::array<std::uint64_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> buffer_{};
  int buffer_pos_ = 4;
  double spare_normal_ = 0.0;
  bool have_spare_ = false;
};

// 64-bit mixing used for substream derivation.
std::uint64_t mix64(std::uint64_t h, std::uint64_t v);

}  // namespace airylab
