#include "orchard/fruits/localizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "orchard/spatial_index.hpp"

namespace orchard::fruits {

void Detection2D::validate(const CameraIntrinsics& intr) const {
  if (!(u_max > u_min) || !(v_max > v_min)) {
    throw std::invalid_argument("detection: degenerate bounding box");
  }
  if (u_min < 0.0 || v_min < 0.0 || u_max > intr.width || v_max > intr.height) {
    throw std::invalid_argument("detection: box outside the frame");
  }
}

std::vector<std::size_t> frustum_select(const lio::MapStore& map,
                                        const PoseSE3& camera_from_world,
                                        const CameraIntrinsics& intrinsics,
                                        const Detection2D& box,
                                        const color::VisibilityParams& visibility) {
  box.validate(intrinsics);
  const auto visible = color::visibility_mask(map, camera_from_world, intrinsics, visibility);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!visible[i]) continue;
    const auto proj = try_project(intrinsics, camera_from_world * map.point(i));
    if (!proj) continue;
    if (proj->u >= box.u_min && proj->u <= box.u_max && proj->v >= box.v_min &&
        proj->v <= box.v_max) {
      out.push_back(i);
    }
  }
  return out;
}

namespace {

// Lexicographic coordinate order; the permutation-invariant tie-break for
// border assignment.
bool coord_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<std::vector<std::size_t>> cluster_points(const std::vector<Vec3>& points,
                                                     double eps, int min_pts) {
  if (!(eps > 0.0)) throw std::invalid_argument("cluster_points: eps must be > 0");
  if (min_pts < 1) throw std::invalid_argument("cluster_points: min_pts must be >= 1");
  const std::size_t n = points.size();
  if (n == 0) return {};

  SpatialIndex index(points);
  std::vector<std::vector<Neighbor>> neighborhoods(n);
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    neighborhoods[i] = index.radius_search(points[i], eps);
    core[i] = neighborhoods[i].size() >= static_cast<std::size_t>(min_pts);
  }

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (const auto& nb : neighborhoods[i]) {
      if (core[nb.index]) uf.unite(i, nb.index);
    }
  }

  // Border points: nearest core neighbor wins; distance ties go to the core
  // with the smaller lexicographic coordinates.
  std::vector<std::ptrdiff_t> owner(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) {
      owner[i] = static_cast<std::ptrdiff_t>(uf.find(i));
      continue;
    }
    std::ptrdiff_t best = -1;
    double best_dist = 0.0;
    for (const auto& nb : neighborhoods[i]) {
      if (!core[nb.index]) continue;
      if (best < 0 || nb.distance < best_dist ||
          (nb.distance == best_dist &&
           coord_less(points[nb.index], points[static_cast<std::size_t>(best)]))) {
        best = static_cast<std::ptrdiff_t>(nb.index);
        best_dist = nb.distance;
      }
    }
    if (best >= 0) owner[i] = static_cast<std::ptrdiff_t>(uf.find(static_cast<std::size_t>(best)));
  }

  std::vector<std::ptrdiff_t> root_to_cluster(n, -1);
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) {
    if (owner[i] < 0) continue;  // noise
    auto& slot = root_to_cluster[static_cast<std::size_t>(owner[i])];
    if (slot < 0) {
      slot = static_cast<std::ptrdiff_t>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot)].push_back(i);
  }
  return clusters;
}

FruitEstimate estimate_fruit(const std::vector<Vec3>& cluster, const LocalizerConfig& config) {
  if (cluster.size() < config.min_cluster_size) {
    throw std::runtime_error("insufficient support");
  }

  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : cluster) centroid += p;
  centroid /= static_cast<double>(cluster.size());

  FruitEstimate est;
  est.center = centroid;
  est.support = cluster.size();

  // Algebraic sphere fit: 2 p.c + (r^2 - |c|^2) = |p|^2, linear in (c, m).
  Eigen::MatrixXd A(cluster.size(), 4);
  Eigen::VectorXd b(cluster.size());
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    A(i, 0) = 2.0 * cluster[i].x();
    A(i, 1) = 2.0 * cluster[i].y();
    A(i, 2) = 2.0 * cluster[i].z();
    A(i, 3) = 1.0;
    b(i) = cluster[i].squaredNorm();
  }
  const Eigen::Vector4d sol = A.colPivHouseholderQr().solve(b);
  const Vec3 center = sol.head<3>();
  const double r2 = sol(3) + center.squaredNorm();
  if (r2 > 0.0 && center.allFinite()) {
    const double radius = std::sqrt(r2);
    double rss = 0.0;
    for (const Vec3& p : cluster) {
      const double d = (p - center).norm() - radius;
      rss += d * d;
    }
    const double rms = std::sqrt(rss / static_cast<double>(cluster.size()));
    if (rms < config.sphere_rms_accept && radius > config.fruit_radius_min &&
        radius < config.fruit_radius_max) {
      est.center = center;
      est.radius = radius;
    }
  }
  return est;
}

std::vector<FruitEstimate> merge_estimates(const std::vector<FruitEstimate>& estimates,
                                           double merge_radius) {
  if (!(merge_radius > 0.0)) throw std::invalid_argument("merge: radius must be > 0");
  const std::size_t n = estimates.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if ((estimates[i].center - estimates[j].center).norm() <= merge_radius) uf.unite(i, j);
    }
  }

  std::vector<std::ptrdiff_t> root_to_out(n, -1);
  std::vector<FruitEstimate> out;
  std::vector<double> weight_sums;
  std::vector<double> radius_weights;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = uf.find(i);
    auto& slot = root_to_out[root];
    if (slot < 0) {
      slot = static_cast<std::ptrdiff_t>(out.size());
      FruitEstimate merged;
      merged.id = static_cast<int>(out.size());
      merged.center = Vec3::Zero();
      out.push_back(merged);
      weight_sums.push_back(0.0);
      radius_weights.push_back(0.0);
    }
    FruitEstimate& m = out[static_cast<std::size_t>(slot)];
    const double w = std::max<double>(1.0, static_cast<double>(estimates[i].support));
    m.center += w * estimates[i].center;
    weight_sums[static_cast<std::size_t>(slot)] += w;
    m.support += estimates[i].support;
    if (estimates[i].radius) {
      const double rw = radius_weights[static_cast<std::size_t>(slot)];
      m.radius = (rw * m.radius.value_or(0.0) + w * *estimates[i].radius) / (rw + w);
      radius_weights[static_cast<std::size_t>(slot)] = rw + w;
    }
    m.detection_ids.insert(m.detection_ids.end(), estimates[i].detection_ids.begin(),
                           estimates[i].detection_ids.end());
  }
  for (std::size_t s = 0; s < out.size(); ++s) {
    out[s].center /= weight_sums[s];
    std::sort(out[s].detection_ids.begin(), out[s].detection_ids.end());
    out[s].detection_ids.erase(
        std::unique(out[s].detection_ids.begin(), out[s].detection_ids.end()),
        out[s].detection_ids.end());
  }
  return out;
}

std::vector<FruitEstimate> localize_from_labels(const lio::MapStore& map,
                                                const std::vector<LabelSelection>& selections,
                                                const LocalizerConfig& config) {
  std::vector<FruitEstimate> out;
  out.reserve(selections.size());
  for (const LabelSelection& sel : selections) {
    if (sel.point_indices.empty()) {
      throw std::invalid_argument("label selection " + std::to_string(sel.fruit_id) +
                                  ": empty point list");
    }
    std::set<std::size_t> unique(sel.point_indices.begin(), sel.point_indices.end());
    std::vector<Vec3> pts;
    pts.reserve(unique.size());
    for (std::size_t idx : unique) {
      if (idx >= map.size()) {
        throw std::out_of_range("label selection " + std::to_string(sel.fruit_id) +
                                ": point index beyond map size");
      }
      pts.push_back(map.point(idx));
    }
    FruitEstimate est = estimate_fruit(pts, config);
    est.id = sel.fruit_id;
    out.push_back(std::move(est));
  }
  return out;
}

std::vector<FruitEstimate> localize_from_detections(const lio::MapStore& map,
                                                    const std::vector<Detection2D>& detections,
                                                    const DetectionContext& context,
                                                    const LocalizerConfig& config,
                                                    LocalizeReport* report) {
  if (context.trajectory.empty()) {
    throw std::invalid_argument("localize_from_detections: empty trajectory");
  }
  const PoseSE3 camera_from_body = context.calib.camera_from_imu();
  const double t_lo = context.trajectory.front().t;
  const double t_hi = context.trajectory.back().t;

  LocalizeReport local;
  std::vector<FruitEstimate> per_detection;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    const Detection2D& det = detections[d];
    if (det.frame_id < 0 ||
        det.frame_id >= static_cast<int>(context.frame_times.size())) {
      ++local.detections_skipped;
      continue;
    }
    const double t = context.frame_times[static_cast<std::size_t>(det.frame_id)];
    if (t < t_lo || t > t_hi) {
      ++local.detections_skipped;
      continue;
    }
    const PoseSE3 camera_from_world =
        camera_from_body * interpolate_pose(context.trajectory, t).inverse();

    const auto indices =
        frustum_select(map, camera_from_world, context.calib.intrinsics, det, config.visibility);
    if (indices.empty()) {
      ++local.detections_empty;
      continue;
    }
    std::vector<Vec3> pts;
    pts.reserve(indices.size());
    for (std::size_t idx : indices) pts.push_back(map.point(idx));

    auto clusters = cluster_points(pts, config.cluster_eps, config.cluster_min_pts);
    std::erase_if(clusters, [&](const auto& c) { return c.size() < config.min_cluster_size; });
    if (clusters.empty()) {
      ++local.detections_empty;
      continue;
    }

    // A 2D box sits on the nearest fruit: keep the cluster with the smallest
    // median camera depth.
    std::size_t best = 0;
    double best_depth = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      std::vector<double> depths;
      depths.reserve(clusters[c].size());
      for (std::size_t k : clusters[c]) depths.push_back((camera_from_world * pts[k]).z());
      std::nth_element(depths.begin(), depths.begin() + depths.size() / 2, depths.end());
      const double median = depths[depths.size() / 2];
      if (median < best_depth) {
        best_depth = median;
        best = c;
      }
    }

    std::vector<Vec3> cluster_pts;
    cluster_pts.reserve(clusters[best].size());
    for (std::size_t k : clusters[best]) cluster_pts.push_back(pts[k]);
    FruitEstimate est = estimate_fruit(cluster_pts, config);
    est.detection_ids = {static_cast<int>(d)};
    per_detection.push_back(std::move(est));
    ++local.detections_used;
  }

  if (report) *report = local;
  return merge_estimates(per_detection, config.merge_radius);
}

}  // namespace orchard::fruits
