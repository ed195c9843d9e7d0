#include "groupsim/random.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace groupsim {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check_range(double lo, double hi) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::kInvalidRange,
                "lower bound " + std::to_string(lo) + " exceeds upper bound " + std::to_string(hi));
  }
}

void check_weights(std::size_t n, std::span<const double> weights) {
  if (weights.empty()) return;
  if (weights.size() != n) throw Error(ErrorCode::kBadWeights, "weight count differs from item count");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error(ErrorCode::kBadWeights, "negative or non-finite weight");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kBadWeights, "weights sum to zero");
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : key_(seed) {}

std::uint64_t RngStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double RngStream::next_unit() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RngStream RngStream::derive(std::string_view label) const {
  if (label.empty()) throw Error(ErrorCode::kInvalidRange, "stream label must be nonempty");
  return RngStream(mix64(mix64(key_ ^ kGamma) ^ hash_label(label)));
}

RngStream derive_stream(const RngStream& parent, std::string_view label) { return parent.derive(label); }

double sample_real(RngStream& rng, double lo, double hi) {
  check_range(lo, hi);
  if (lo == hi) return lo;
  const double x = lo + (hi - lo) * rng.next_unit();
  // Rounding can land exactly on hi for wide ranges.
  return x < hi ? x : std::nextafter(hi, lo);
}

std::int64_t sample_int(RngStream& rng, std::int64_t lo, std::int64_t hi) {
  if (lo > hi) {
    throw Error(ErrorCode::kInvalidRange,
                "lower bound " + std::to_string(lo) + " exceeds upper bound " + std::to_string(hi));
  }
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng.next_u64());  // full 64-bit range
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = rng.next_u64();
  while (x >= limit) x = rng.next_u64();
  return lo + static_cast<std::int64_t>(x % span);
}

std::size_t sample_index(RngStream& rng, std::size_t n, std::span<const double> weights) {
  if (n == 0) throw Error(ErrorCode::kEmptyItems, "cannot choose from an empty list");
  check_weights(n, weights);
  if (weights.empty()) return static_cast<std::size_t>(sample_int(rng, 0, static_cast<std::int64_t>(n) - 1));
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double target = rng.next_unit() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (target < acc) return i;
  }
  return last_positive;
}

void validate(const DistributionSpec& spec) {
  struct Visitor {
    void operator()(const RealUniform& d) const { check_range(d.lo, d.hi); }
    void operator()(const IntUniform& d) const {
      if (d.lo > d.hi) throw Error(ErrorCode::kInvalidRange, "integer range lo > hi");
    }
    void operator()(const Choice& d) const {
      if (d.items.empty()) throw Error(ErrorCode::kEmptyItems, "choice has no items");
      check_weights(d.items.size(), d.weights);
    }
    void operator()(const ColorHSV& d) const {
      for (const auto& r : {d.h, d.s, d.v}) check_range(r.lo, r.hi);
    }
    void operator()(const ColorRGBA& d) const {
      for (const auto& r : {d.r, d.g, d.b, d.a}) check_range(r.lo, r.hi);
    }
    void operator()(const Cartesian& d) const {
      for (const auto& r : {d.x, d.y, d.z}) check_range(r.lo, r.hi);
    }
    void operator()(const EulerY& d) const { check_range(d.lo_deg, d.hi_deg); }
  };
  std::visit(Visitor{}, spec);
}

double sample(RngStream& rng, const RealUniform& d) { return sample_real(rng, d.lo, d.hi); }

std::int64_t sample(RngStream& rng, const IntUniform& d) { return sample_int(rng, d.lo, d.hi); }

const std::string& sample(RngStream& rng, const Choice& d) {
  return sample_choice(rng, d.items, d.weights);
}

Eigen::Vector3d sample(RngStream& rng, const ColorHSV& d) {
  const double h = sample(rng, d.h);
  const double s = sample(rng, d.s);
  const double v = sample(rng, d.v);
  return {h, s, v};
}

Eigen::Vector4d sample(RngStream& rng, const ColorRGBA& d) {
  const double r = sample(rng, d.r);
  const double g = sample(rng, d.g);
  const double b = sample(rng, d.b);
  const double a = sample(rng, d.a);
  return {r, g, b, a};
}

Eigen::Vector3d sample(RngStream& rng, const Cartesian& d) {
  const double x = sample(rng, d.x);
  const double y = sample(rng, d.y);
  const double z = sample(rng, d.z);
  return {x, y, z};
}

double sample(RngStream& rng, const EulerY& d) {
  const double deg = sample_real(rng, d.lo_deg, d.hi_deg);
  const double wrapped = std::fmod(deg, 360.0);
  return wrapped < 0.0 ? wrapped + 360.0 : wrapped;
}

}  // namespace groupsim
