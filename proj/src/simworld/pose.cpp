#include "one4all/simworld/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace one4all::sim {

Pose to_pose(const validation::Pose6d& p) {
    Pose pose;
    pose.position = {p.x, p.y, p.z};
    pose.orientation = Eigen::Quaterniond(p.qw, p.qx, p.qy, p.qz).normalized();
    return pose;
}

validation::Pose6d to_pose6d(const Pose& p) {
    const auto& q = p.orientation;
    return {p.position.x(), p.position.y(), p.position.z(), q.w(), q.x(), q.y(), q.z()};
}

Eigen::Vector3d forward_axis(const Eigen::Quaterniond& q) { return q * Eigen::Vector3d::UnitX(); }

Eigen::Quaterniond look_at(const Eigen::Vector3d& from, const Eigen::Vector3d& target, const Eigen::Vector3d& up) {
    const Eigen::Vector3d x = target - from;
    if (x.norm() < 1e-12) throw std::invalid_argument("look_at: camera and target coincide");
    const Eigen::Vector3d fx = x.normalized();
    Eigen::Vector3d y = up.cross(fx);
    if (y.norm() < 1e-9) y = Eigen::Vector3d::UnitX().cross(fx);
    if (y.norm() < 1e-9) y = Eigen::Vector3d::UnitY().cross(fx);
    y.normalize();
    const Eigen::Vector3d z = fx.cross(y);
    Eigen::Matrix3d r;
    r.col(0) = fx;
    r.col(1) = y;
    r.col(2) = z;
    return Eigen::Quaterniond(r).normalized();
}

Pose compose_relative(const Pose& current, const Pose& relative) {
    Pose out;
    out.position = current.position + current.orientation * relative.position;
    out.orientation = (current.orientation * relative.orientation.normalized()).normalized();
    return out;
}

std::vector<Pose> nbv_viewpoints(const Eigen::Vector3d& object, int k, double radius) {
    if (k < 1) throw std::invalid_argument("nbv_viewpoints: k must be at least 1");
    if (!(radius > 0)) throw std::invalid_argument("nbv_viewpoints: radius must be positive");
    std::vector<Pose> views;
    views.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double azimuth = 2.0 * std::numbers::pi * i / k;
        Pose v;
        v.position = object + radius * Eigen::Vector3d(std::cos(azimuth), std::sin(azimuth), 0.0);
        v.orientation = look_at(v.position, object);
        views.push_back(v);
    }
    return views;
}

double look_at_error(const Pose& view, const Eigen::Vector3d& target) {
    const Eigen::Vector3d want = (target - view.position).normalized();
    const double c = std::clamp(forward_axis(view.orientation).dot(want), -1.0, 1.0);
    return std::acos(c);
}

bool in_view_cone(const Pose& camera, const Eigen::Vector3d& point, double half_angle_rad, double range_m) {
    const Eigen::Vector3d v = point - camera.position;
    const double d = v.norm();
    if (d > range_m) return false;
    if (d < 1e-12) return true;
    return forward_axis(camera.orientation).dot(v / d) >= std::cos(half_angle_rad);
}

std::vector<Eigen::Vector3d> capture_slice(const Pose& camera, const Eigen::Vector3d& object, double sigma, int points,
                                           std::mt19937_64& rng) {
    std::normal_distribution<double> noise(0.0, sigma);
    const Eigen::Vector3d toward_camera = (camera.position - object).normalized();
    const Eigen::Quaterniond inv = camera.orientation.conjugate();
    std::vector<Eigen::Vector3d> slice;
    slice.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const Eigen::Vector3d offset(noise(rng), noise(rng), noise(rng));
        if (offset.dot(toward_camera) < 0) continue;
        slice.push_back(inv * (object + offset - camera.position));
    }
    return slice;
}

std::vector<Eigen::Vector3d> merge_slices(const std::vector<Pose>& cameras,
                                          const std::vector<std::vector<Eigen::Vector3d>>& slices) {
    if (cameras.size() != slices.size()) throw std::invalid_argument("merge_slices: one camera per slice");
    std::vector<Eigen::Vector3d> merged;
    for (std::size_t i = 0; i < slices.size(); ++i) {
        for (const auto& p : slices[i]) merged.push_back(cameras[i].orientation * p + cameras[i].position);
    }
    return merged;
}

}  // namespace one4all::sim
