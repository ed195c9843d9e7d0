#pragma once

#include <Eigen/Core>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "groupsim/dynamics.hpp"
#include "groupsim/error.hpp"
#include "groupsim/geometry.hpp"
#include "groupsim/random.hpp"

namespace groupsim {

/// Repulsive social-force constants.
template <typename Scalar = double>
struct ForceParams {
  Scalar A = Scalar(2000);     // force units
  Scalar B = Scalar(0.08);     // meters
  Scalar k = Scalar(120000);   // force per meter
  Scalar default_radius = Scalar(0.225);  // half of a 0.45 m shoulder width
};

namespace detail {

template <typename Scalar>
void unit_from_j_to_i(const Vec3<Scalar>& p_i, const Vec3<Scalar>& p_j, Vec3<Scalar>& n, Scalar& d) {
  const Vec3<Scalar> diff = p_i - p_j;
  d = diff.norm();
  if (!(d > Scalar(0))) throw Error(ErrorCode::kCoincidentPoints, "force undefined for coincident positions");
  n = diff / d;
}

}  // namespace detail

/// A * exp((r_i + r_j - d_ij) / B) * n_ij, with n_ij pointing from j to i.
template <typename Scalar>
Vec3<Scalar> interaction_force(const Vec3<Scalar>& p_i, const Vec3<Scalar>& p_j, Scalar r_i, Scalar r_j,
                               const ForceParams<Scalar>& params = {}) {
  Vec3<Scalar> n;
  Scalar d;
  detail::unit_from_j_to_i(p_i, p_j, n, d);
  return params.A * std::exp((r_i + r_j - d) / params.B) * n;
}

/// k * max(0, r_i + r_j - d_ij) * n_ij.
template <typename Scalar>
Vec3<Scalar> contact_force(const Vec3<Scalar>& p_i, const Vec3<Scalar>& p_j, Scalar r_i, Scalar r_j,
                           const ForceParams<Scalar>& params = {}) {
  Vec3<Scalar> n;
  Scalar d;
  detail::unit_from_j_to_i(p_i, p_j, n, d);
  const Scalar overlap = std::max(Scalar(0), r_i + r_j - d);
  return (params.k * overlap) * n;
}

template <typename Scalar>
Vec3<Scalar> total_force(const Vec3<Scalar>& p_i, const Vec3<Scalar>& p_j, Scalar r_i, Scalar r_j,
                         const ForceParams<Scalar>& params = {}) {
  return interaction_force(p_i, p_j, r_i, r_j, params) + contact_force(p_i, p_j, r_i, r_j, params);
}

struct ForceReport {
  double interaction_force = 0.0;
  double contact_force = 0.0;
  double total_force = 0.0;
  double collision_frequency = 0.0;
  /// Set when the group has fewer than two persons; all values are zero.
  bool single_person = false;
};

/// Per frame and person, the magnitude of the vector sum of pairwise forces
/// from every other group member, averaged over all (person, frame) cells.
/// Radii come from the motion's per-person body radii.
ForceReport social_force_report(const GroupMotion& motion, const ForceParams<double>& params = {},
                                double collision_threshold = 0.45);

/// Number of (frame, unordered pair) events closer than threshold, divided by
/// the pair count P(P-1)/2. Throws Error(kSinglePerson) for P < 2.
double collision_frequency(const GroupMotion& motion, double threshold = 0.45);

/// Equal-dimension feature vectors stored as rows.
struct FeatureSet {
  std::string label;
  Eigen::MatrixXd vectors;  // N x D

  Eigen::Index size() const { return vectors.rows(); }
  Eigen::Index dim() const { return vectors.cols(); }
};

FeatureSet make_feature_set(const std::vector<Eigen::VectorXd>& vectors, std::string label = {});

struct FidResult {
  double value = 0.0;
  bool regularized = false;  // 1e-6 * I added to both covariances
};

/// Frechet distance between Gaussian fits (mean and maximum-likelihood
/// covariance) of two feature sets.
FidResult fid_detailed(const FeatureSet& a, const FeatureSet& b);
double fid(const FeatureSet& a, const FeatureSet& b);

/// Mean Euclidean distance over n_pairs random index pairs drawn with
/// replacement; identical indices are redrawn.
double diversity(const FeatureSet& a, int n_pairs, RngStream& rng);

/// Per-class diversity averaged over classes. Each class uses a stream
/// derived from its label.
double multimodality(const std::map<std::string, FeatureSet>& sets_by_class, int n_pairs, RngStream& rng);

/// Group-level descriptor: speed statistics, pairwise distance statistics,
/// heading dispersion, spread, and centroid displacement.
Eigen::VectorXd group_features(const GroupMotion& motion);
inline constexpr int kGroupFeatureDim = 10;

/// Per-person descriptor: velocity statistics and heading change.
std::vector<Eigen::VectorXd> person_features(const GroupMotion& motion);
inline constexpr int kPersonFeatureDim = 6;

}  // namespace groupsim
