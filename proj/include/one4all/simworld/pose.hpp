#pragma once

#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "one4all/validation/validator.hpp"

namespace one4all::sim {

// Camera/end-effector convention: the forward (optical) axis is body +x.
struct Pose {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

Pose to_pose(const validation::Pose6d& p);
validation::Pose6d to_pose6d(const Pose& p);

Eigen::Vector3d forward_axis(const Eigen::Quaterniond& q);

// Orientation whose +x axis points from `from` to `target`, with +z as close
// to `up` as possible. Falls back to another up vector when the view is
// parallel to `up`.
Eigen::Quaterniond look_at(const Eigen::Vector3d& from, const Eigen::Vector3d& target,
                           const Eigen::Vector3d& up = Eigen::Vector3d::UnitZ());

// q_new = q_cur * q_rel, offset expressed in the current frame, renormalised.
Pose compose_relative(const Pose& current, const Pose& relative);

// k viewpoints on the horizontal circle of `radius` around `object`, starting
// at azimuth 0 (the +x side) and spaced 2*pi/k apart, each looking at the object.
std::vector<Pose> nbv_viewpoints(const Eigen::Vector3d& object, int k, double radius);

// Angle in radians between the pose's forward axis and the ray to `target`.
double look_at_error(const Pose& view, const Eigen::Vector3d& target);

bool in_view_cone(const Pose& camera, const Eigen::Vector3d& point, double half_angle_rad, double range_m);

// Synthetic point cloud capture: an object-centred Gaussian point set, keeping
// only points on the hemisphere facing the camera, expressed in camera frame.
std::vector<Eigen::Vector3d> capture_slice(const Pose& camera, const Eigen::Vector3d& object, double sigma,
                                           int points, std::mt19937_64& rng);

// Transforms each camera-frame slice back to the base frame and concatenates.
std::vector<Eigen::Vector3d> merge_slices(const std::vector<Pose>& cameras,
                                          const std::vector<std::vector<Eigen::Vector3d>>& slices);

}  // namespace one4all::sim
