#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "arw/bvh.hpp"
#include "arw/config.hpp"
#include "arw/errors.hpp"
#include "arw/sensor_model.hpp"
#include "arw/vehicle_model.hpp"

namespace arw {

struct Landmark {
  int id = 0;
  Vec3 position;
  bool active = true;
};

// Mean and covariance over robot pose (x, y, z, yaw) and the active landmark
// positions, landmarks appended by id ascending. Covariance must stay SPD.
struct Belief {
  Configuration pose;
  std::vector<Landmark> landmarks;
  Eigen::MatrixXd cov;

  std::size_t dim() const { return 4 + 3 * landmarks.size(); }
};

struct BeliefNoise {
  // Odometry variance per meter traveled: x, y, z (m^2/m) and yaw (rad^2/m).
  double q_xyz = 0.01 * 0.01;
  double q_yaw = (0.5 * kPi / 180.0) * (0.5 * kPi / 180.0);
  // Bearing measurement variance per axis (rad^2 equivalent).
  double r_bearing = (1.0 * kPi / 180.0) * (1.0 * kPi / 180.0);
};

inline Belief make_belief(const Configuration& pose, const std::vector<Landmark>& landmarks,
                          double pose_var = 1e-4, double landmark_var = 1e-2) {
  Belief b;
  b.pose = pose;
  b.landmarks = landmarks;
  std::sort(b.landmarks.begin(), b.landmarks.end(),
            [](const Landmark& a, const Landmark& c) { return a.id < c.id; });
  std::size_t n = 4 + 3 * b.landmarks.size();
  b.cov = Eigen::MatrixXd::Zero(n, n);
  b.cov.topLeftCorner(4, 4) = pose_var * Eigen::Matrix4d::Identity();
  for (std::size_t i = 0; i < b.landmarks.size(); ++i)
    b.cov.block(4 + 3 * i, 4 + 3 * i, 3, 3) = landmark_var * Eigen::Matrix3d::Identity();
  return b;
}

// Geometric mean of the eigenvalues: exp((1/n) log det). Throws NotSPD when
// any eigenvalue <= 1e-12 or the matrix is not symmetric.
inline double d_optimality(const Eigen::MatrixXd& cov) {
  if (cov.rows() != cov.cols()) throw NotSPD();
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-9) throw NotSPD();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  double log_sum = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()[i];
    if (ev <= 1e-12) throw NotSPD();
    log_sum += std::log(ev);
  }
  return std::exp(log_sum / static_cast<double>(cov.rows()));
}

inline double min_eigenvalue(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  return es.eigenvalues().minCoeff();
}

namespace detail {

// Unit-bearing measurement of one landmark in the body (yaw) frame, with
// Jacobians w.r.t. pose and the landmark position.
struct BearingModel {
  Eigen::Vector3d h;
  Eigen::Matrix<double, 3, 4> H_pose;
  Eigen::Matrix3d H_landmark;
};

inline BearingModel bearing_model(const Configuration& pose, const Vec3& landmark) {
  double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  Eigen::Matrix3d Rt;  // world -> body
  Rt << c, s, 0, -s, c, 0, 0, 0, 1;
  Eigen::Matrix3d dRt;  // d(Rt)/dyaw
  dRt << -s, c, 0, -c, -s, 0, 0, 0, 0;
  Eigen::Vector3d delta(landmark.x - pose.position.x, landmark.y - pose.position.y,
                        landmark.z - pose.position.z);
  Eigen::Vector3d b = Rt * delta;
  double norm = b.norm();
  Eigen::Vector3d h = b / norm;
  Eigen::Matrix3d dh_db = (Eigen::Matrix3d::Identity() - h * h.transpose()) / norm;

  BearingModel m;
  m.h = h;
  m.H_pose.leftCols<3>() = dh_db * (-Rt);
  m.H_pose.col(3) = dh_db * (dRt * delta);
  m.H_landmark = dh_db * Rt;
  return m;
}

}  // namespace detail

// True iff the landmark is inside the frustum at `config` and, when a world
// mesh is given, not occluded by it.
inline bool landmark_visible(const SensorModel& sensor, const Configuration& config,
                             const Vec3& landmark, const Bvh* world) {
  if (!in_frustum(sensor, config, landmark)) return false;
  if (world) {
    Vec3 view = landmark - config.position;
    double range = view.norm();
    if (range <= 0.0) return true;
    auto hit = world->ray_cast(Ray{config.position, view / range, range - 1e-6});
    if (hit) return false;
  }
  return true;
}

// EKF covariance propagation along a local path: additive odometry noise on
// the pose block per waypoint step, bearing updates for every landmark that
// passes the visibility check at that waypoint. Means are kinematic (the
// simulated robot tracks the path; landmarks are static), so innovation is
// zero and only the covariance evolves. Output symmetrized each step.
inline Belief propagate_belief(const Belief& input, const LocalPath& path,
                               const SensorModel& sensor, const BeliefNoise& noise,
                               const Bvh* world = nullptr) {
  if (min_eigenvalue(input.cov) <= 1e-12) throw NotSPD();
  Belief b = input;
  std::size_t dim = b.dim();
  for (std::size_t w = 1; w < path.waypoints.size(); ++w) {
    const Configuration& prev = path.waypoints[w - 1];
    const Configuration& cur = path.waypoints[w];
    double step_len = dist(prev.position, cur.position);
    // Prediction: pose moves by odometry, landmarks static (F = I).
    if (step_len > 0.0) {
      b.cov(0, 0) += noise.q_xyz * step_len;
      b.cov(1, 1) += noise.q_xyz * step_len;
      b.cov(2, 2) += noise.q_xyz * step_len;
      b.cov(3, 3) += noise.q_yaw * step_len;
    }
    b.pose = cur;

    for (std::size_t li = 0; li < b.landmarks.size(); ++li) {
      const Landmark& lm = b.landmarks[li];
      if (!lm.active || !landmark_visible(sensor, cur, lm.position, world)) continue;
      auto m = detail::bearing_model(cur, lm.position);
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3, dim);
      H.block(0, 0, 3, 4) = m.H_pose;
      H.block(0, 4 + 3 * li, 3, 3) = m.H_landmark;
      double r = std::max(noise.r_bearing, 1e-12);
      Eigen::Matrix3d S = H * b.cov * H.transpose() + r * Eigen::Matrix3d::Identity();
      Eigen::MatrixXd K = b.cov * H.transpose() * S.inverse();
      b.cov = (Eigen::MatrixXd::Identity(dim, dim) - K * H) * b.cov;
    }
    b.cov = 0.5 * (b.cov + b.cov.transpose()).eval();
  }
  return b;
}

}  // namespace arw
