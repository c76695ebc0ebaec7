#include "isospec/rng.hpp"

namespace isospec {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// splitmix64 finalizer, used to decorrelate raw seed/stream words
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

RandomEngine::RandomEngine(RngStream stream) : stream_(stream) {
    std::uint64_t k = mix64(stream.seed);
    std::uint64_t s = mix64(stream.stream_id ^ 0xA02BDBF7BB3C0A7ull);
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    counter_ = {0u, 0u, static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
}

void RandomEngine::refill() {
    std::array<std::uint32_t, 4> x = counter_;
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, x[0], hi0, lo0);
        mulhilo(kPhiloxM1, x[2], hi1, lo1);
        x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    block_ = x;
    block_pos_ = 0;
    // 64-bit draw counter in words 0-1; words 2-3 stay pinned to the stream id
    if (++counter_[0] == 0u) ++counter_[1];
}

std::uint32_t RandomEngine::next_u32() {
    if (block_pos_ >= 4) refill();
    return block_[block_pos_++];
}

std::uint64_t RandomEngine::next_u64() {
    std::uint64_t lo = next_u32();
    std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
}

double RandomEngine::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomEngine::uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double RandomEngine::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
}

std::complex<double> RandomEngine::complex_normal() {
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    double re = normal();
    double im = normal();
    return {re * inv_sqrt2, im * inv_sqrt2};
}

}  // namespace isospec
