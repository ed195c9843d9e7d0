#include "groupsim/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace groupsim {
namespace {

constexpr double kFidRegularizer = 1e-6;

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

void moments(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  cov = (centered.transpose() * centered) / static_cast<double>(x.rows());
}

bool rank_deficient(const Eigen::MatrixXd& cov, Eigen::Index n) {
  if (n <= cov.rows()) return true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  const double largest = std::max(es.eigenvalues().maxCoeff(), 1.0);
  return es.eigenvalues().minCoeff() <= 1e-12 * largest;
}

double circular_dispersion(const std::vector<double>& headings_deg) {
  if (headings_deg.empty()) return 0.0;
  double c = 0.0, s = 0.0;
  for (double h : headings_deg) {
    c += std::cos(deg_to_rad(h));
    s += std::sin(deg_to_rad(h));
  }
  const double r = std::hypot(c, s) / static_cast<double>(headings_deg.size());
  return 1.0 - r;
}

}  // namespace

ForceReport social_force_report(const GroupMotion& motion, const ForceParams<double>& params,
                                double collision_threshold) {
  motion.validate();
  ForceReport report;
  const int P = motion.persons();
  if (P < 2) {
    report.single_person = true;
    return report;
  }
  const int T = motion.frames;
  double sum_int = 0.0, sum_cont = 0.0, sum_total = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < P; ++i) {
      Eigen::Vector3d f_int = Eigen::Vector3d::Zero();
      Eigen::Vector3d f_cont = Eigen::Vector3d::Zero();
      const Eigen::Vector3d& pi = motion.at(i, t).position;
      for (int j = 0; j < P; ++j) {
        if (j == i) continue;
        const Eigen::Vector3d& pj = motion.at(j, t).position;
        const double ri = motion.body_radii[static_cast<std::size_t>(i)];
        const double rj = motion.body_radii[static_cast<std::size_t>(j)];
        f_int += interaction_force<double>(pi, pj, ri, rj, params);
        f_cont += contact_force<double>(pi, pj, ri, rj, params);
      }
      sum_int += f_int.norm();
      sum_cont += f_cont.norm();
      sum_total += (f_int + f_cont).norm();
    }
  }
  const double cells = static_cast<double>(P) * T;
  report.interaction_force = sum_int / cells;
  report.contact_force = sum_cont / cells;
  report.total_force = sum_total / cells;
  report.collision_frequency = collision_frequency(motion, collision_threshold);
  return report;
}

double collision_frequency(const GroupMotion& motion, double threshold) {
  motion.validate();
  const int P = motion.persons();
  if (P < 2) throw Error(ErrorCode::kSinglePerson, "collision frequency needs at least two persons");
  long long events = 0;
  for (int t = 0; t < motion.frames; ++t) {
    for (int i = 0; i < P; ++i) {
      for (int j = i + 1; j < P; ++j) {
        if ((motion.at(i, t).position - motion.at(j, t).position).norm() < threshold) ++events;
      }
    }
  }
  return static_cast<double>(events) / (0.5 * P * (P - 1));
}

FeatureSet make_feature_set(const std::vector<Eigen::VectorXd>& vectors, std::string label) {
  if (vectors.empty()) throw Error(ErrorCode::kEmptySet, "feature set is empty");
  const Eigen::Index dim = vectors.front().size();
  FeatureSet set;
  set.label = std::move(label);
  set.vectors.resize(static_cast<Eigen::Index>(vectors.size()), dim);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim) throw Error(ErrorCode::kDimensionMismatch, "feature vectors differ in length");
    set.vectors.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
  }
  return set;
}

FidResult fid_detailed(const FeatureSet& a, const FeatureSet& b) {
  if (a.size() == 0 || b.size() == 0) throw Error(ErrorCode::kEmptySet, "fid needs nonempty feature sets");
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimensionMismatch, "fid feature dimensions differ");

  Eigen::VectorXd mu_a, mu_b;
  Eigen::MatrixXd cov_a, cov_b;
  moments(a.vectors, mu_a, cov_a);
  moments(b.vectors, mu_b, cov_b);

  FidResult out;
  if (rank_deficient(cov_a, a.size()) || rank_deficient(cov_b, b.size())) {
    const Eigen::MatrixXd eps = kFidRegularizer * Eigen::MatrixXd::Identity(a.dim(), a.dim());
    cov_a += eps;
    cov_b += eps;
    out.regularized = true;
  }

  // Tr((S_a S_b)^(1/2)) = Tr((S_a^(1/2) S_b S_a^(1/2))^(1/2)), which is symmetric.
  const Eigen::MatrixXd root_a = psd_sqrt(cov_a);
  const Eigen::MatrixXd cross = psd_sqrt(root_a * cov_b * root_a);
  const double value = (mu_a - mu_b).squaredNorm() + cov_a.trace() + cov_b.trace() - 2.0 * cross.trace();
  out.value = std::max(0.0, value);
  return out;
}

double fid(const FeatureSet& a, const FeatureSet& b) { return fid_detailed(a, b).value; }

double diversity(const FeatureSet& a, int n_pairs, RngStream& rng) {
  if (a.size() == 0) throw Error(ErrorCode::kEmptySet, "diversity needs a nonempty set");
  if (a.size() < 2) throw Error(ErrorCode::kSingletonSet, "diversity needs at least two vectors");
  if (n_pairs < 1) throw Error(ErrorCode::kInvalidCount, "n_pairs must be >= 1");
  const std::int64_t last = a.size() - 1;
  double total = 0.0;
  for (int k = 0; k < n_pairs; ++k) {
    const auto i = sample_int(rng, 0, last);
    auto j = sample_int(rng, 0, last);
    while (j == i) j = sample_int(rng, 0, last);
    total += (a.vectors.row(i) - a.vectors.row(j)).norm();
  }
  return total / n_pairs;
}

double multimodality(const std::map<std::string, FeatureSet>& sets_by_class, int n_pairs, RngStream& rng) {
  if (sets_by_class.empty()) throw Error(ErrorCode::kEmptySet, "multimodality needs at least one class");
  double total = 0.0;
  for (const auto& [label, set] : sets_by_class) {
    if (set.size() < 2) throw Error(ErrorCode::kUndersizedClass, "class '" + label + "' has fewer than two vectors");
    RngStream class_rng = rng.derive("class/" + label);
    total += diversity(set, n_pairs, class_rng);
  }
  return total / static_cast<double>(sets_by_class.size());
}

Eigen::VectorXd group_features(const GroupMotion& motion) {
  motion.validate();
  const int P = motion.persons();
  const int T = motion.frames;

  std::vector<double> speeds;
  for (int p = 0; p < P; ++p) {
    for (int t = 1; t < T; ++t) {
      speeds.push_back((motion.at(p, t).position - motion.at(p, t - 1).position).norm() * motion.fps);
    }
  }
  auto mean_std = [](const std::vector<double>& v) {
    if (v.empty()) return std::pair{0.0, 0.0};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, std::sqrt(s / static_cast<double>(v.size()))};
  };

  std::vector<double> pair_dists;
  double min_dist = 0.0;
  bool have_min = false;
  double dispersion = 0.0, spread = 0.0;
  for (int t = 0; t < T; ++t) {
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    std::vector<double> headings;
    for (int p = 0; p < P; ++p) {
      centroid += motion.at(p, t).position;
      headings.push_back(motion.at(p, t).heading);
    }
    centroid /= P;
    for (int p = 0; p < P; ++p) spread += (motion.at(p, t).position - centroid).norm() / (P * T);
    dispersion += circular_dispersion(headings) / T;
    for (int i = 0; i < P; ++i) {
      for (int j = i + 1; j < P; ++j) {
        const double d = (motion.at(i, t).position - motion.at(j, t).position).norm();
        pair_dists.push_back(d);
        min_dist = have_min ? std::min(min_dist, d) : d;
        have_min = true;
      }
    }
  }

  Eigen::Vector3d c0 = Eigen::Vector3d::Zero(), c1 = Eigen::Vector3d::Zero();
  for (int p = 0; p < P; ++p) {
    c0 += motion.at(p, 0).position;
    c1 += motion.at(p, T - 1).position;
  }
  const double displacement = ((c1 - c0) / P).norm();

  const auto [speed_mean, speed_std] = mean_std(speeds);
  const auto [dist_mean, dist_std] = mean_std(pair_dists);
  Eigen::VectorXd f(kGroupFeatureDim);
  f << speed_mean, speed_std, dist_mean, dist_std, min_dist, dispersion, spread, displacement,
      static_cast<double>(P), std::log1p(static_cast<double>(P));
  return f;
}

std::vector<Eigen::VectorXd> person_features(const GroupMotion& motion) {
  motion.validate();
  std::vector<Eigen::VectorXd> out;
  const int T = motion.frames;
  for (int p = 0; p < motion.persons(); ++p) {
    Eigen::Vector3d v_mean = Eigen::Vector3d::Zero();
    double speed_sum = 0.0, speed_sq = 0.0, speed_max = 0.0;
    for (int t = 1; t < T; ++t) {
      const Eigen::Vector3d v = (motion.at(p, t).position - motion.at(p, t - 1).position) * motion.fps;
      v_mean += v;
      const double s = v.norm();
      speed_sum += s;
      speed_sq += s * s;
      speed_max = std::max(speed_max, s);
    }
    const double steps = std::max(1, T - 1);
    v_mean /= steps;
    const double mean = speed_sum / steps;
    const double var = std::max(0.0, speed_sq / steps - mean * mean);
    double turn = motion.at(p, T - 1).heading - motion.at(p, 0).heading;
    turn = std::abs(std::remainder(turn, 360.0));
    Eigen::VectorXd f(kPersonFeatureDim);
    f << v_mean.x(), v_mean.z(), mean, std::sqrt(var), speed_max, turn;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace groupsim
