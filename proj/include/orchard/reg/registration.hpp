#pragma once

#include <vector>

#include "orchard/point_cloud.hpp"

namespace orchard::reg {

struct Landmark {
  int id = 0;
  Vec3 position{0, 0, 0};
};

using LandmarkSet = std::vector<Landmark>;

// Closed-form least-squares rigid alignment (SVD) over landmark pairs
// matched by id, reflection excluded by determinant correction. Requires at
// least 3 shared, non-collinear landmarks; otherwise throws
// "degenerate landmarks". Missing ids on either side are an error.
PoseSE3 align_landmarks(const LandmarkSet& src, const LandmarkSet& dst);

// Bidirectional overlap at threshold d:
//   r_d = (|{a in A : dist(a,B) <= d}| + |{b in B : dist(b,A) <= d}|) / (|A|+|B|)
// Distances are exact nearest-neighbor distances; the comparison is done on
// squared values so results match a brute-force scan bit for bit.
double ratio_at_threshold(const PointCloud& a, const PointCloud& b, double d);

struct RegistrationReport {
  std::vector<double> thresholds;  // m
  std::vector<double> ratios;      // r_d per threshold, same order
  double average_ratio = 0.0;      // arithmetic mean of ratios
  std::size_t count_a = 0;
  std::size_t count_b = 0;
};

RegistrationReport average_ratio(const PointCloud& a, const PointCloud& b,
                                 const std::vector<double>& thresholds);

// Aligns `reconstructed` into the reference frame via the landmark pairs,
// then scores the overlap.
struct EvaluateResult {
  PoseSE3 alignment;  // reference_from_reconstructed
  RegistrationReport report;
};

EvaluateResult evaluate(const PointCloud& reconstructed, const PointCloud& reference,
                        const LandmarkSet& reconstructed_landmarks,
                        const LandmarkSet& reference_landmarks,
                        const std::vector<double>& thresholds);

}  // namespace orchard::reg
