#pragma once

// Test-only reference implementations. They are written from the
// definitions directly (flat loops, two-pass statistics, full sorts) and
// share no code with the library beyond its plain data types.

#include "difem/dataset.hpp"
#include "difem/features.hpp"
#include "difem/pose.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace oracle {

bool usable(const difem::Keypoint& kp, double floor = 0.0);

// Returns {x_min, x_max, y_min, y_max} or nothing.
std::optional<std::array<double, 4>> body_box(const difem::PersonPose& person, double floor = 0.0);

std::size_t overlap_count(const difem::FramePoses& frame, std::span<const difem::JointSpec> joints,
                          double floor = 0.0);

std::vector<double> pair_velocities(const difem::FramePoses& a, const difem::FramePoses& b,
                                    std::span<const difem::JointSpec> joints, double floor = 0.0);

// (mean_vel, max_vel, var_vel, mean_overlap, var_overlap), flat pooling.
std::array<double, 5> features(const difem::VideoPoseSequence& seq,
                               std::span<const difem::JointSpec> joints, double floor = 0.0);

struct Split {
    std::size_t feature;
    double threshold;
    double decrease;
};

// Exhaustive enumeration of every (feature, midpoint) on unit-weight rows.
std::optional<Split> best_split(const difem::Dataset& data);

// Majority among the k nearest rows after a full stable sort by distance.
difem::Label knn(const difem::Dataset& data, std::span<const double> query, std::size_t k);

// Nearest class centroid (Euclidean).
difem::Label nearest_centroid(const difem::Dataset& train, std::span<const double> query);

} // namespace oracle
