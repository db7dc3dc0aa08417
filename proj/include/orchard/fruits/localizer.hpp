#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orchard/camera.hpp"
#include "orchard/color/colorizer.hpp"
#include "orchard/lio/map_store.hpp"

namespace orchard::fruits {

// 2D evidence, either a detector output or a manual box.
struct Detection2D {
  int frame_id = 0;
  double u_min = 0.0, v_min = 0.0, u_max = 0.0, v_max = 0.0;  // px
  std::string label = "fruit";
  double confidence = 1.0;

  // Box must be non-degenerate and inside the frame.
  void validate(const CameraIntrinsics& intr) const;
};

struct FruitEstimate {
  int id = 0;
  Vec3 center{0, 0, 0};               // world, m
  std::optional<double> radius;       // accepted sphere fit only
  std::size_t support = 0;            // contributing point count
  std::vector<int> detection_ids;
};

// Manual labeling path: a human picked map point indices for one fruit.
struct LabelSelection {
  int fruit_id = 0;
  std::vector<std::size_t> point_indices;
};

struct LocalizerConfig {
  double cluster_eps = 0.03;          // m
  int cluster_min_pts = 5;            // DBSCAN core threshold
  std::size_t min_cluster_size = 10;  // estimate_fruit support floor
  double merge_radius = 0.05;         // m
  double sphere_rms_accept = 0.01;    // m
  double fruit_radius_min = 0.005;    // m
  double fruit_radius_max = 0.3;      // m
  color::VisibilityParams visibility;
};

// Indices of visible map points whose projection falls inside the box
// (continuous coordinates, inclusive bounds).
std::vector<std::size_t> frustum_select(const lio::MapStore& map,
                                        const PoseSE3& camera_from_world,
                                        const CameraIntrinsics& intrinsics,
                                        const Detection2D& box,
                                        const color::VisibilityParams& visibility = {});

// DBSCAN: neighbors within eps (inclusive, self counted), cores have at
// least min_pts neighbors, clusters are connected components of cores plus
// border points; noise is discarded. Border points attach to their nearest
// core (ties by the core's lexicographic coordinates), which keeps the
// partition invariant under input permutation.
std::vector<std::vector<std::size_t>> cluster_points(const std::vector<Vec3>& points,
                                                     double eps, int min_pts);

// Centroid plus an algebraic least-squares sphere fit; the fit is kept when
// its RMS geometric residual and radius pass the config gates, otherwise the
// estimate is centroid-only. Throws "insufficient support" below
// min_cluster_size.
FruitEstimate estimate_fruit(const std::vector<Vec3>& cluster_points,
                             const LocalizerConfig& config);

// Greedy agglomeration: estimates within merge_radius join one fruit
// (transitively, so chains merge); centers combine support-weighted.
std::vector<FruitEstimate> merge_estimates(const std::vector<FruitEstimate>& estimates,
                                           double merge_radius);

// Manual path: one estimate per selection, indices deduplicated first.
std::vector<FruitEstimate> localize_from_labels(const lio::MapStore& map,
                                                const std::vector<LabelSelection>& selections,
                                                const LocalizerConfig& config);

struct DetectionContext {
  std::vector<double> frame_times;     // indexed by Detection2D::frame_id
  std::vector<TimedPose> trajectory;   // body poses
  CalibrationSet calib;
};

struct LocalizeReport {
  int detections_used = 0;
  int detections_empty = 0;   // frustum or clustering produced nothing
  int detections_skipped = 0; // bad frame id / outside trajectory span
};

// Detector path: frustum -> cluster -> keep the nearest (smallest median
// depth) cluster -> sphere fit, then merge across detections.
std::vector<FruitEstimate> localize_from_detections(const lio::MapStore& map,
                                                    const std::vector<Detection2D>& detections,
                                                    const DetectionContext& context,
                                                    const LocalizerConfig& config,
                                                    LocalizeReport* report = nullptr);

}  // namespace orchard::fruits
