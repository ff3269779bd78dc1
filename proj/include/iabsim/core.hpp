#pragma once

// Shared vocabulary: strong ids, slot type, error types and the seeded
// random source used by every stochastic component.

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace iabsim {

using Slot = std::int64_t;

template <typename Tag>
struct StrongId {
  std::uint32_t value{0};

  constexpr StrongId() = default;
  constexpr explicit StrongId(std::uint32_t v) : value(v) {}

  constexpr std::size_t index() const { return value; }

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
};

using NodeId = StrongId<struct NodeIdTag>;
using LinkId = StrongId<struct LinkIdTag>;
using FlowId = StrongId<struct FlowIdTag>;

inline constexpr NodeId kDonor{0};

// Errors ---------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoRoute : Error {
  using Error::Error;
};

struct NoDisjointPair : Error {
  using Error::Error;
};

// Raised when a run breaks one of the simulator's hard invariants
// (buffer cap under the RFAS guard, packet conservation, schedule
// independence). Always a bug, never a recoverable condition.
struct InvariantViolation : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Random source --------------------------------------------------------------

// mt19937_64 is fully specified by the standard; the distributions are not,
// so uniform draws are derived from raw bits to keep traces bit-identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Stream ids so placement and channel draws never share a sequence.
namespace streams {
inline constexpr std::uint64_t kPlacement = 0x706c6163;
inline constexpr std::uint64_t kChannel = 0x6368616e;
}  // namespace streams

}  // namespace iabsim

template <typename Tag>
struct std::hash<iabsim::StrongId<Tag>> {
  std::size_t operator()(iabsim::StrongId<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
