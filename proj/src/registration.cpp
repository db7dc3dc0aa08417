#include "orchard/reg/registration.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "orchard/spatial_index.hpp"

namespace orchard::reg {

namespace {

// Second singular value of the centered point matrix; near zero means the
// landmarks are collinear and the rotation is unobservable.
double second_principal_extent(const std::vector<Vec3>& pts) {
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::MatrixXd centered(pts.size(), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) centered.row(i) = (pts[i] - mean).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
  return svd.singularValues()(1);
}

}  // namespace

PoseSE3 align_landmarks(const LandmarkSet& src, const LandmarkSet& dst) {
  std::map<int, Vec3> dst_by_id;
  for (const Landmark& l : dst) dst_by_id[l.id] = l.position;

  std::vector<Vec3> src_pts, dst_pts;
  for (const Landmark& l : src) {
    const auto it = dst_by_id.find(l.id);
    if (it == dst_by_id.end()) {
      throw std::invalid_argument("align_landmarks: landmark id " + std::to_string(l.id) +
                                  " missing from the destination set");
    }
    src_pts.push_back(l.position);
    dst_pts.push_back(it->second);
  }
  if (src_pts.size() < 3) throw std::invalid_argument("degenerate landmarks");
  if (second_principal_extent(src_pts) <= 1e-6 || second_principal_extent(dst_pts) <= 1e-6) {
    throw std::invalid_argument("degenerate landmarks");
  }

  Vec3 src_mean = Vec3::Zero(), dst_mean = Vec3::Zero();
  for (const Vec3& p : src_pts) src_mean += p;
  for (const Vec3& p : dst_pts) dst_mean += p;
  src_mean /= static_cast<double>(src_pts.size());
  dst_mean /= static_cast<double>(dst_pts.size());

  Mat3 H = Mat3::Zero();
  for (std::size_t i = 0; i < src_pts.size(); ++i) {
    H += (src_pts[i] - src_mean) * (dst_pts[i] - dst_mean).transpose();
  }
  const Eigen::JacobiSVD<Mat3> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  const Mat3 R = svd.matrixV() * D * svd.matrixU().transpose();
  const Vec3 t = dst_mean - R * src_mean;
  return PoseSE3(Rotation(R), t);
}

double ratio_at_threshold(const PointCloud& a, const PointCloud& b, double d) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ratio_at_threshold: empty cloud");
  if (!(d > 0.0)) throw std::invalid_argument("ratio_at_threshold: threshold must be > 0");

  const SpatialIndex index_a(a);
  const SpatialIndex index_b(b);
  const double d2 = d * d;
  std::size_t registered = 0;
  for (const Vec3& p : a.points) registered += (index_b.nearest_dist2(p) <= d2);
  for (const Vec3& p : b.points) registered += (index_a.nearest_dist2(p) <= d2);
  return static_cast<double>(registered) / static_cast<double>(a.size() + b.size());
}

RegistrationReport average_ratio(const PointCloud& a, const PointCloud& b,
                                 const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw std::invalid_argument("average_ratio: no thresholds");
  RegistrationReport report;
  report.thresholds = thresholds;
  report.count_a = a.size();
  report.count_b = b.size();
  double sum = 0.0;
  for (double d : thresholds) {
    const double r = ratio_at_threshold(a, b, d);
    report.ratios.push_back(r);
    sum += r;
  }
  report.average_ratio = sum / static_cast<double>(thresholds.size());
  return report;
}

EvaluateResult evaluate(const PointCloud& reconstructed, const PointCloud& reference,
                        const LandmarkSet& reconstructed_landmarks,
                        const LandmarkSet& reference_landmarks,
                        const std::vector<double>& thresholds) {
  EvaluateResult result;
  result.alignment = align_landmarks(reconstructed_landmarks, reference_landmarks);
  const PointCloud aligned = transform_points(result.alignment, reconstructed);
  result.report = average_ratio(aligned, reference, thresholds);
  return result;
}

}  // namespace orchard::reg
