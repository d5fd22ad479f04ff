#include "difem/features.hpp"

#include "difem/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace difem {

std::string_view to_string(Joint joint)
{
    switch (joint) {
    case Joint::RightWrist: return "right_wrist";
    case Joint::LeftWrist: return "left_wrist";
    case Joint::RightElbow: return "right_elbow";
    case Joint::LeftElbow: return "left_elbow";
    case Joint::RightHip: return "right_hip";
    case Joint::LeftHip: return "left_hip";
    case Joint::RightKnee: return "right_knee";
    case Joint::LeftKnee: return "left_knee";
    case Joint::RightAnkle: return "right_ankle";
    case Joint::LeftAnkle: return "left_ankle";
    case Joint::Neck: return "neck";
    }
    return "unknown";
}

const std::array<JointSpec, kSelectedJointCount>& selected_joints() noexcept
{
    static constexpr std::array<JointSpec, kSelectedJointCount> joints{{
        {Joint::RightWrist, 4, 1.0},
        {Joint::LeftWrist, 7, 1.0},
        {Joint::RightElbow, 3, 0.8},
        {Joint::LeftElbow, 6, 0.8},
        {Joint::RightHip, 9, 1.0},
        {Joint::LeftHip, 12, 1.0},
        {Joint::RightKnee, 10, 1.0},
        {Joint::LeftKnee, 13, 1.0},
        {Joint::RightAnkle, 11, 1.0},
        {Joint::LeftAnkle, 14, 1.0},
        {Joint::Neck, 1, 1.0},
    }};
    return joints;
}

std::vector<double> FeatureVector::enabled_values() const
{
    std::vector<double> out;
    if (velocity_enabled) {
        out.insert(out.end(), {mean_velocity, max_velocity, var_velocity});
    }
    if (overlap_enabled) {
        out.insert(out.end(), {mean_overlap, var_overlap});
    }
    return out;
}

double joint_velocity(const Keypoint& p_t, const Keypoint& p_next, double weight) noexcept
{
    const double dx = p_next.x - p_t.x;
    const double dy = p_next.y - p_t.y;
    return std::sqrt(weight * (dx * dx + dy * dy));
}

std::vector<VelocityObservation> match_and_measure(const FramePoses& frame_t,
                                                   const FramePoses& frame_next,
                                                   std::span<const JointSpec> joints,
                                                   double confidence_floor)
{
    std::vector<VelocityObservation> out;
    if (frame_t.persons.empty() || frame_next.persons.empty()) {
        return out;
    }
    out.reserve(frame_t.persons.size() * joints.size());

    for (std::size_t i = 0; i < frame_t.persons.size(); ++i) {
        for (const JointSpec& joint : joints) {
            const Keypoint& from = frame_t.persons[i].keypoints[joint.body25_index];
            if (!is_valid(from, confidence_floor)) {
                continue;
            }
            const Keypoint* nearest = nullptr;
            double best = std::numeric_limits<double>::infinity();
            for (const PersonPose& candidate : frame_next.persons) {
                const Keypoint& to = candidate.keypoints[joint.body25_index];
                if (!is_valid(to, confidence_floor)) {
                    continue;
                }
                const double dx = to.x - from.x;
                const double dy = to.y - from.y;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best) {
                    best = d2;
                    nearest = &to;
                }
            }
            if (nearest != nullptr) {
                out.push_back({frame_t.frame_index, i, joint, joint_velocity(from, *nearest, joint.weight)});
            }
        }
    }
    return out;
}

std::optional<BBox> person_bbox(const PersonPose& person, double confidence_floor)
{
    std::size_t valid = 0;
    BBox box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Keypoint& kp : person.keypoints) {
        if (!is_valid(kp, confidence_floor)) {
            continue;
        }
        ++valid;
        box.x_min = std::min(box.x_min, kp.x);
        box.x_max = std::max(box.x_max, kp.x);
        box.y_min = std::min(box.y_min, kp.y);
        box.y_max = std::max(box.y_max, kp.y);
    }
    if (valid < 2) {
        return std::nullopt;
    }
    return box;
}

OverlapObservation joint_overlap_count(const FramePoses& frame, std::span<const JointSpec> joints,
                                       double confidence_floor)
{
    OverlapObservation obs{frame.frame_index, 0};
    const std::size_t n = frame.persons.size();
    if (n < 2) {
        return obs;
    }
    std::vector<std::optional<BBox>> boxes;
    boxes.reserve(n);
    for (const PersonPose& person : frame.persons) {
        boxes.push_back(person_bbox(person, confidence_floor));
    }
    for (std::size_t p1 = 0; p1 < n; ++p1) {
        for (std::size_t p2 = 0; p2 < n; ++p2) {
            if (p1 == p2 || !boxes[p2]) {
                continue;
            }
            for (const JointSpec& joint : joints) {
                const Keypoint& kp = frame.persons[p1].keypoints[joint.body25_index];
                if (is_valid(kp, confidence_floor) && boxes[p2]->contains(kp.x, kp.y)) {
                    ++obs.count;
                }
            }
        }
    }
    return obs;
}

namespace {

// Welford accumulator; population variance.
struct RunningStats {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double max = 0.0;

    void push(double value)
    {
        ++n;
        const double delta = value - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (value - mean);
        max = n == 1 ? value : std::max(max, value);
    }
    double variance() const { return n == 0 ? 0.0 : std::max(0.0, m2 / static_cast<double>(n)); }
};

} // namespace

VelocityStats aggregate_velocity(std::span<const VelocityObservation> obs)
{
    RunningStats stats;
    for (const VelocityObservation& o : obs) {
        stats.push(o.velocity);
    }
    return {stats.mean, stats.max, stats.variance()};
}

VelocityStats aggregate_velocity_per_frame(std::span<const VelocityObservation> obs)
{
    RunningStats series;
    std::size_t begin = 0;
    while (begin < obs.size()) {
        std::size_t end = begin;
        RunningStats frame;
        while (end < obs.size() && obs[end].frame_index == obs[begin].frame_index) {
            frame.push(obs[end].velocity);
            ++end;
        }
        series.push(frame.mean);
        begin = end;
    }
    return {series.mean, series.max, series.variance()};
}

OverlapStats aggregate_overlap(std::span<const OverlapObservation> obs)
{
    RunningStats stats;
    for (const OverlapObservation& o : obs) {
        stats.push(static_cast<double>(o.count));
    }
    return {stats.mean, stats.variance()};
}

FeatureVector extract_features(const VideoPoseSequence& seq, const FeatureConfig& config)
{
    if (!config.enable_velocity && !config.enable_overlap) {
        throw ConfigError("at least one of the velocity and overlap feature groups must be enabled");
    }

    FeatureVector fv;
    fv.video_id = seq.video_id;
    fv.label = seq.label;
    fv.velocity_enabled = config.enable_velocity;
    fv.overlap_enabled = config.enable_overlap;

    if (config.enable_velocity) {
        std::vector<VelocityObservation> velocities;
        for (std::size_t t = 0; t + 1 < seq.frames.size(); ++t) {
            auto pair = match_and_measure(seq.frames[t], seq.frames[t + 1], config.joints,
                                          config.confidence_floor);
            velocities.insert(velocities.end(), pair.begin(), pair.end());
        }
        if (config.normalize_to) {
            const double diagonal = std::hypot(config.normalize_to->width, config.normalize_to->height);
            if (!(diagonal > 0.0)) {
                throw ConfigError("normalization frame size must be positive");
            }
            for (VelocityObservation& v : velocities) {
                v.velocity /= diagonal;
            }
        }
        const VelocityStats stats = config.per_frame_velocity ? aggregate_velocity_per_frame(velocities)
                                                              : aggregate_velocity(velocities);
        fv.mean_velocity = stats.mean;
        fv.max_velocity = stats.max;
        fv.var_velocity = stats.var;
    }

    if (config.enable_overlap) {
        std::vector<OverlapObservation> overlaps;
        overlaps.reserve(seq.frames.size());
        for (const FramePoses& frame : seq.frames) {
            overlaps.push_back(joint_overlap_count(frame, config.joints, config.confidence_floor));
        }
        const OverlapStats stats = aggregate_overlap(overlaps);
        fv.mean_overlap = stats.mean;
        fv.var_overlap = stats.var;
    }
    return fv;
}

std::vector<FeatureVector> extract_features_batch(std::span<const VideoPoseSequence> videos,
                                                  const FeatureConfig& config, int jobs)
{
    std::vector<FeatureVector> out(videos.size());
    detail::parallel_for(videos.size(), jobs,
                         [&](std::size_t i) { out[i] = extract_features(videos[i], config); });
    return out;
}

std::vector<FeatureVector> extract_features_batch_serial(std::span<const VideoPoseSequence> videos,
                                                         const FeatureConfig& config)
{
    std::vector<FeatureVector> out;
    out.reserve(videos.size());
    for (const VideoPoseSequence& video : videos) {
        out.push_back(extract_features(video, config));
    }
    return out;
}

} // namespace difem
