#pragma once

// DIFEM feature extraction: weighted joint velocities between consecutive
// frames and per-frame joint overlap counts, aggregated per video into a
// five-value vector.

#include "difem/pose.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace difem {

enum class Joint {
    RightWrist,
    LeftWrist,
    RightElbow,
    LeftElbow,
    RightHip,
    LeftHip,
    RightKnee,
    LeftKnee,
    RightAnkle,
    LeftAnkle,
    Neck,
};

std::string_view to_string(Joint joint);

struct JointSpec {
    Joint name;
    std::size_t body25_index;
    double weight;
};

inline constexpr std::size_t kSelectedJointCount = 11;

// The eleven joints in their canonical order, with BODY-25 indices and weights.
const std::array<JointSpec, kSelectedJointCount>& selected_joints() noexcept;

struct VelocityObservation {
    std::size_t frame_index;
    std::size_t person_index;
    JointSpec joint;
    double velocity;
};

struct BBox {
    double x_min;
    double x_max;
    double y_min;
    double y_max;

    bool contains(double x, double y) const noexcept
    {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    friend bool operator==(const BBox&, const BBox&) = default;
};

struct OverlapObservation {
    std::size_t frame_index;
    std::size_t count;
};

struct FrameSize {
    double width;
    double height;
};

struct FeatureConfig {
    std::vector<JointSpec> joints{selected_joints().begin(), selected_joints().end()};
    double confidence_floor = 0.0;
    bool enable_velocity = true;
    bool enable_overlap = true;
    // When set, velocities are divided by the frame diagonal.
    std::optional<FrameSize> normalize_to;
    // Average each frame pair first, then take statistics over the per-pair
    // means. Off: statistics over every observation pooled.
    bool per_frame_velocity = false;
};

inline constexpr std::size_t kFeatureCount = 5;

struct FeatureVector {
    double mean_velocity = 0.0;
    double max_velocity = 0.0;
    double var_velocity = 0.0;
    double mean_overlap = 0.0;
    double var_overlap = 0.0;

    std::string video_id;
    std::optional<Label> label;
    bool velocity_enabled = true;
    bool overlap_enabled = true;

    std::array<double, kFeatureCount> values() const noexcept
    {
        return {mean_velocity, max_velocity, var_velocity, mean_overlap, var_overlap};
    }
    // Only the enabled groups, in canonical order (d = 5, 3 or 2).
    std::vector<double> enabled_values() const;
};

// sqrt(w * ((x' - x)^2 + (y' - y)^2)). Both keypoints must be valid.
double joint_velocity(const Keypoint& p_t, const Keypoint& p_next, double weight) noexcept;

// For every person of frame_t and every joint with a valid keypoint, match the
// nearest valid keypoint of the same joint across all persons of frame_next
// (ties -> lowest person index) and emit its weighted velocity.
std::vector<VelocityObservation> match_and_measure(const FramePoses& frame_t,
                                                   const FramePoses& frame_next,
                                                   std::span<const JointSpec> joints,
                                                   double confidence_floor = 0.0);

// Box over all valid keypoints (all 25); empty with fewer than two.
std::optional<BBox> person_bbox(const PersonPose& person, double confidence_floor = 0.0);

// JO summed over ordered person pairs (p1 != p2).
OverlapObservation joint_overlap_count(const FramePoses& frame, std::span<const JointSpec> joints,
                                       double confidence_floor = 0.0);

struct VelocityStats {
    double mean = 0.0;
    double max = 0.0;
    double var = 0.0;
};

struct OverlapStats {
    double mean = 0.0;
    double var = 0.0;
};

// Population statistics over all observations; empty input -> zeros.
VelocityStats aggregate_velocity(std::span<const VelocityObservation> obs);
// Statistics over the per-frame-pair mean velocity series.
VelocityStats aggregate_velocity_per_frame(std::span<const VelocityObservation> obs);
OverlapStats aggregate_overlap(std::span<const OverlapObservation> obs);

// Throws ConfigError when both groups are disabled. A disabled group is
// written as zeros and flagged in the provenance fields.
FeatureVector extract_features(const VideoPoseSequence& seq, const FeatureConfig& config = {});

// Per-video extraction over a batch. The parallel variant uses up to `jobs`
// OpenMP threads (0 = runtime default); results are identical to the serial
// reference and in input order.
std::vector<FeatureVector> extract_features_batch(std::span<const VideoPoseSequence> videos,
                                                  const FeatureConfig& config, int jobs = 0);
std::vector<FeatureVector> extract_features_batch_serial(std::span<const VideoPoseSequence> videos,
                                                         const FeatureConfig& config);

} // namespace difem
