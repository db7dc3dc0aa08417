#include "orchard/geometry.hpp"

#include <algorithm>

namespace orchard {

PoseSE3 interpolate_pose(const std::vector<TimedPose>& poses, double t) {
  if (poses.empty()) throw std::invalid_argument("interpolate_pose: empty pose sequence");
  if (t <= poses.front().t) return poses.front().pose;
  if (t >= poses.back().t) return poses.back().pose;

  const auto it = std::lower_bound(poses.begin(), poses.end(), t,
                                   [](const TimedPose& p, double ts) { return p.t < ts; });
  const TimedPose& hi = *it;
  const TimedPose& lo = *(it - 1);
  const double span = hi.t - lo.t;
  if (span <= 0.0) return lo.pose;
  const double u = (t - lo.t) / span;
  PoseSE3 out;
  out.rotation = lo.pose.rotation.slerp(u, hi.pose.rotation);
  out.translation = (1.0 - u) * lo.pose.translation + u * hi.pose.translation;
  return out;
}

}  // namespace orchard
