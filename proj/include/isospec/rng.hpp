#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace isospec {

// Identifies one reproducible random stream.  (seed, stream_id) fully
// determines the output sequence; distinct stream_ids give independent
// streams, so parallel replicas can each own one.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

// Philox4x32-10 counter-based generator.  The key is derived from the
// seed, the upper counter words from the stream id, so the whole output
// sequence is a pure function of (seed, stream_id, draw index) and is
// identical no matter how work is split across threads.
class RandomEngine {
  public:
    explicit RandomEngine(RngStream stream);

    RngStream stream() const { return stream_; }

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // uniform on [0, 1), 53-bit resolution
    double uniform();
    // uniform on (0, 1], for safe use under log()
    double uniform_pos();
    // standard normal, Box-Muller over Philox uniforms (no libstdc++
    // distribution involved, so output is platform-stable)
    double normal();
    // complex standard normal: independent N(0,1/2) real and imaginary parts
    std::complex<double> complex_normal();

  private:
    void refill();

    RngStream stream_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_;
    int block_pos_ = 4;  // forces refill on first use
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace isospec
