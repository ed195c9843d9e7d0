#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "groupsim/error.hpp"

namespace groupsim {

/// Counter-based random stream keyed by a 64-bit seed.
///
/// Output k of a stream is a pure function of (key, k), so a stream can be
/// copied to replay it. Child streams are derived from the parent key and a
/// text label only; the parent's position in its own sequence is irrelevant,
/// which makes derivation order-independent across siblings.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Seed the stream was constructed from (the derived key for child streams).
  std::uint64_t seed() const noexcept { return key_; }
  std::uint64_t draws() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  /// Uniform double in [0, 1) with 53 bits of resolution.
  double next_unit() noexcept;

  RngStream derive(std::string_view label) const;

  friend bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

RngStream derive_stream(const RngStream& parent, std::string_view label);

double sample_real(RngStream& rng, double lo, double hi);
std::int64_t sample_int(RngStream& rng, std::int64_t lo, std::int64_t hi);

/// Index into a population of size n. Uniform when weights is empty.
std::size_t sample_index(RngStream& rng, std::size_t n, std::span<const double> weights = {});

template <typename T>
const T& sample_choice(RngStream& rng, std::span<const T> items, std::span<const double> weights = {}) {
  return items[sample_index(rng, items.size(), weights)];
}

template <typename T>
const T& sample_choice(RngStream& rng, const std::vector<T>& items,
                       std::span<const double> weights = {}) {
  return sample_choice(rng, std::span<const T>(items), weights);
}

// Distribution kinds used by the scene randomizers.

struct RealUniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct IntUniform {
  std::int64_t lo = 0;
  std::int64_t hi = 0;  // inclusive
};

struct Choice {
  std::vector<std::string> items;
  std::vector<double> weights;  // empty means uniform
};

struct ColorHSV {
  RealUniform h, s, v;
};

struct ColorRGBA {
  RealUniform r, g, b, a;
};

struct Cartesian {
  RealUniform x, y, z;
};

/// Rotation about the vertical axis, degrees.
struct EulerY {
  double lo_deg = 0.0;
  double hi_deg = 360.0;
};

using DistributionSpec =
    std::variant<RealUniform, IntUniform, Choice, ColorHSV, ColorRGBA, Cartesian, EulerY>;

/// Throws Error(kInvalidRange | kEmptyItems | kBadWeights) when the spec is malformed.
void validate(const DistributionSpec& spec);

double sample(RngStream& rng, const RealUniform& d);
std::int64_t sample(RngStream& rng, const IntUniform& d);
const std::string& sample(RngStream& rng, const Choice& d);
Eigen::Vector3d sample(RngStream& rng, const ColorHSV& d);
Eigen::Vector4d sample(RngStream& rng, const ColorRGBA& d);
Eigen::Vector3d sample(RngStream& rng, const Cartesian& d);
double sample(RngStream& rng, const EulerY& d);

/// Default randomizer ranges.
namespace randomizers {

inline const RealUniform kCameraRadius{6.0, 10.0};
inline const RealUniform kCameraRotation{0.0, 360.0};
inline const RealUniform kCameraHeight{1.0, 5.0};
inline const Cartesian kCameraPerturbation{{-1.0, 1.0}, {0.0, 0.0}, {-1.0, 1.0}};
inline const RealUniform kCameraFov{40.0, 70.0};

inline const Cartesian kLightPosition{{-20.0, 20.0}, {0.0, 0.0}, {-20.0, 20.0}};
inline const RealUniform kLightHeight{5.0, 10.0};
inline const RealUniform kLightIntensity{0.5, 3.0};
inline const Cartesian kLightTarget{{-50.0, 50.0}, {0.0, 0.0}, {-50.0, 50.0}};

inline const Cartesian kGroupPosition{{-20.0, 20.0}, {0.0, 0.0}, {-20.0, 20.0}};
inline const EulerY kGroupRotation{0.0, 360.0};

inline const ColorRGBA kBodyColor{{0.4, 1.0}, {0.4, 1.0}, {0.4, 1.0}, {0.6, 1.0}};
inline const ColorHSV kClothesColor{{0.0, 1.0}, {0.0, 1.0}, {0.4, 1.0}};

inline constexpr double kPositionPerturbationFraction = 0.25;
inline constexpr double kRotationPerturbationDeg = 45.0;
inline const RealUniform kBlendParameter{0.0, 1.0};
inline const RealUniform kAnimationSpeed{0.8, 1.2};
inline const RealUniform kNormalizedStartTime{0.0, 1.0};

}  // namespace randomizers

}  // namespace groupsim
