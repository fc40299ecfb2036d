#pragma once

#include <cstdint>
#include <utility>

namespace hynoma {

/// Counter-based deterministic random stream (SplitMix64 output function).
///
/// Every consumer derives its own substream from a root seed, so draw
/// sequences are independent of evaluation order and worker count:
/// the k-th value of a given stream is a pure function of (seed, stream, k).
class Rng {
  public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream * 0x9E3779B97F4A7C15ULL + 1))), counter_(0) {}

    /// Independent child stream; deterministic in (this stream, id).
    Rng substream(std::uint64_t id) const {
        Rng r(*this);
        r.key_ = mix(key_ ^ mix((id + 1) * 0xBF58476D1CE4E5B9ULL + 0x94D049BB133111EBULL));
        r.counter_ = 0;
        return r;
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal pair (Box-Muller); consumes exactly two words.
    std::pair<double, double> normal_pair();

    double normal() { return normal_pair().first; }

    /// Index in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    static std::uint64_t mix(std::uint64_t z);

  private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

/// Stable 64-bit content hash (FNV-1a) for config fingerprints.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL);

} // namespace hynoma
