#pragma once

#include "difem/dataset.hpp"
#include "difem/pose.hpp"
#include "difem/rng.hpp"

#include <cstddef>
#include <initializer_list>
#include <tuple>

namespace fixtures {

// Person whose listed BODY-25 indices are detected (confidence 0.9); every
// other keypoint is missing.
inline difem::PersonPose person_with(std::initializer_list<std::tuple<std::size_t, double, double>> points)
{
    difem::PersonPose person;
    for (const auto& [index, x, y] : points) {
        person.keypoints[index] = {x, y, 0.9};
    }
    return person;
}

// Random keypoint in a 640x360 frame, missing with probability `missing`.
// Coordinates are snapped to a coarse grid now and then so ties occur.
inline difem::Keypoint random_keypoint(difem::Rng& rng, double missing)
{
    if (rng.bernoulli(missing)) {
        return {};
    }
    double x = rng.uniform(0.0, 640.0);
    double y = rng.uniform(0.0, 360.0);
    if (rng.bernoulli(0.2)) {
        x = static_cast<double>(rng.below(16)) * 40.0;
        y = static_cast<double>(rng.below(9)) * 40.0;
    }
    return {x, y, rng.uniform(0.05, 1.0)};
}

inline difem::PersonPose random_person(difem::Rng& rng, double missing = 0.15)
{
    difem::PersonPose person;
    for (auto& kp : person.keypoints) {
        kp = random_keypoint(rng, missing);
    }
    return person;
}

// Person clustered around (cx, cy) so boxes of different persons overlap.
inline difem::PersonPose clustered_person(difem::Rng& rng, double cx, double cy, double missing = 0.1)
{
    difem::PersonPose person;
    for (auto& kp : person.keypoints) {
        if (rng.bernoulli(missing)) {
            kp = {};
        } else {
            kp = {cx + rng.uniform(-40.0, 40.0), cy + rng.uniform(-90.0, 90.0), rng.uniform(0.05, 1.0)};
        }
    }
    return person;
}

inline difem::FramePoses random_frame(difem::Rng& rng, std::size_t max_persons = 5)
{
    difem::FramePoses frame;
    const std::size_t n = rng.below(max_persons + 1);
    const double cx = rng.uniform(100.0, 540.0);
    for (std::size_t p = 0; p < n; ++p) {
        frame.persons.push_back(rng.bernoulli(0.7) ? clustered_person(rng, cx + rng.uniform(-60.0, 60.0), 180.0)
                                                   : random_person(rng));
    }
    return frame;
}

inline difem::VideoPoseSequence random_sequence(difem::Rng& rng, std::size_t max_persons = 5,
                                                std::size_t max_frames = 30)
{
    difem::VideoPoseSequence seq;
    seq.video_id = "random";
    const std::size_t frames = rng.below(max_frames + 1);
    for (std::size_t t = 0; t < frames; ++t) {
        difem::FramePoses frame = random_frame(rng, max_persons);
        frame.frame_index = t;
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

// Every BODY-25 keypoint of a standing person occupying x in [x0, x0 + 40].
inline difem::PersonPose standing(double x0, double y0)
{
    difem::PersonPose p;
    for (std::size_t k = 0; k < difem::kBody25Keypoints; ++k) {
        p.keypoints[k] = {x0 + static_cast<double>(k % 5) * 10.0, y0 + static_cast<double>(k) * 8.0, 0.8};
    }
    return p;
}

// Person A (x in [100, 140]) reaches `inside` selected joints into person
// B's box; B's only keypoint left of x = 170 is its nose, which is not a
// selected joint, so no B joint counts against A's box.
inline difem::FramePoses reach_frame(std::size_t inside)
{
    difem::PersonPose a = standing(100.0, 100.0);
    const std::size_t reaching[] = {4, 3, 7, 6, 1};  // r-wrist, r-elbow, l-wrist, l-elbow, neck
    for (std::size_t i = 0; i < inside; ++i) {
        a.keypoints[reaching[i]] = {152.0 + 2.0 * static_cast<double>(i), 150.0 + 10.0 * static_cast<double>(i), 0.9};
    }
    difem::PersonPose b = standing(170.0, 100.0);
    b.keypoints[0] = {150.0, 120.0, 0.9};
    difem::FramePoses frame;
    frame.persons = {a, b};
    return frame;
}

// Two Gaussian blobs whose centres are `gap` apart along every axis.
inline difem::Dataset gaussian_blobs(difem::Rng& rng, std::size_t per_class, std::size_t dim, double gap)
{
    difem::Dataset data(dim);
    std::vector<double> row(dim);
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const auto label = i % 2 == 0 ? difem::Label::NonFight : difem::Label::Fight;
        for (double& v : row) {
            v = rng.normal() + (label == difem::Label::Fight ? gap : 0.0);
        }
        data.add(row, label);
    }
    return data;
}

} // namespace fixtures
