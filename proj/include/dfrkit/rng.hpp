#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dfr {

/// Philox4x32-10 counter-based block cipher (Salmon et al., Random123).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter encrypt(Counter ctr, Key key) noexcept;
};

/// A reproducible random stream identified by (seed, stream id).
///
/// Every stream is an independent Philox counter sequence: the seed is the
/// cipher key and the stream id occupies the upper half of the counter, so
/// streams can be created in any order, on any thread, and always produce
/// the same numbers. Satisfies UniformRandomBitGenerator.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on (0, 1]; never returns 0 so it is safe for inverse transforms.
    double uniform() noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int used_ = 4;
};

/// Stream id namespaces so that different consumers of one master seed
/// never share counters.
namespace streams {
inline constexpr std::uint64_t kTrajectory = 0;
inline constexpr std::uint64_t kDirect = std::uint64_t{1} << 62;
inline constexpr std::uint64_t kAuxiliary = std::uint64_t{2} << 62;
inline constexpr std::uint64_t kAssociation = std::uint64_t{3} << 62;
}  // namespace streams

}  // namespace dfr
