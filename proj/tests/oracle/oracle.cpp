#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

using namespace difem;

bool usable(const Keypoint& kp, double floor)
{
    if (kp.x == 0.0 && kp.y == 0.0 && kp.confidence == 0.0) {
        return false;
    }
    return kp.confidence > 0.0 && !(kp.confidence < floor);
}

std::optional<std::array<double, 4>> body_box(const PersonPose& person, double floor)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (const Keypoint& kp : person.keypoints) {
        if (usable(kp, floor)) {
            xs.push_back(kp.x);
            ys.push_back(kp.y);
        }
    }
    if (xs.size() < 2) {
        return std::nullopt;
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    return std::array<double, 4>{xs.front(), xs.back(), ys.front(), ys.back()};
}

std::size_t overlap_count(const FramePoses& frame, std::span<const JointSpec> joints, double floor)
{
    std::size_t total = 0;
    for (std::size_t a = 0; a < frame.persons.size(); ++a) {
        for (std::size_t b = 0; b < frame.persons.size(); ++b) {
            if (a == b) {
                continue;
            }
            const auto box = body_box(frame.persons[b], floor);
            if (!box) {
                continue;
            }
            for (const JointSpec& j : joints) {
                const Keypoint& kp = frame.persons[a].keypoints[j.body25_index];
                if (!usable(kp, floor)) {
                    continue;
                }
                const bool in_x = (*box)[0] <= kp.x && kp.x <= (*box)[1];
                const bool in_y = (*box)[2] <= kp.y && kp.y <= (*box)[3];
                total += (in_x && in_y) ? 1 : 0;
            }
        }
    }
    return total;
}

std::vector<double> pair_velocities(const FramePoses& a, const FramePoses& b,
                                    std::span<const JointSpec> joints, double floor)
{
    std::vector<double> out;
    for (const PersonPose& person : a.persons) {
        for (const JointSpec& j : joints) {
            const Keypoint& from = person.keypoints[j.body25_index];
            if (!usable(from, floor)) {
                continue;
            }
            std::vector<double> squared;
            for (const PersonPose& candidate : b.persons) {
                const Keypoint& to = candidate.keypoints[j.body25_index];
                squared.push_back(usable(to, floor) ? std::pow(to.x - from.x, 2) + std::pow(to.y - from.y, 2)
                                                    : INFINITY);
            }
            if (squared.empty()) {
                continue;
            }
            const double nearest = *std::min_element(squared.begin(), squared.end());
            if (std::isinf(nearest)) {
                continue;
            }
            out.push_back(std::sqrt(j.weight * nearest));
        }
    }
    return out;
}

namespace {

std::array<double, 2> mean_var(const std::vector<double>& values)
{
    if (values.empty()) {
        return {0.0, 0.0};
    }
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, ss / n};
}

} // namespace

std::array<double, 5> features(const VideoPoseSequence& seq, std::span<const JointSpec> joints, double floor)
{
    std::vector<double> velocities;
    for (std::size_t t = 1; t < seq.frames.size(); ++t) {
        const auto v = pair_velocities(seq.frames[t - 1], seq.frames[t], joints, floor);
        velocities.insert(velocities.end(), v.begin(), v.end());
    }
    std::vector<double> overlaps;
    for (const FramePoses& frame : seq.frames) {
        overlaps.push_back(static_cast<double>(overlap_count(frame, joints, floor)));
    }
    const auto [vm, vv] = mean_var(velocities);
    const double vmax = velocities.empty() ? 0.0 : *std::max_element(velocities.begin(), velocities.end());
    const auto [om, ov] = mean_var(overlaps);
    return {vm, vmax, vv, om, ov};
}

std::optional<Split> best_split(const Dataset& data)
{
    auto impurity = [](double n0, double n1) {
        const double n = n0 + n1;
        return 1.0 - (n0 / n) * (n0 / n) - (n1 / n) * (n1 / n);
    };
    double all[2] = {0, 0};
    for (std::size_t i = 0; i < data.size(); ++i) {
        all[label_index(data.label(i))] += 1;
    }
    const double parent = impurity(all[0], all[1]);

    std::optional<Split> best;
    for (std::size_t f = 0; f < data.dimension(); ++f) {
        std::vector<double> values;
        for (std::size_t i = 0; i < data.size(); ++i) {
            values.push_back(data.value(i, f));
        }
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t v = 0; v + 1 < values.size(); ++v) {
            const double threshold = (values[v] + values[v + 1]) / 2.0;
            double left[2] = {0, 0};
            double right[2] = {0, 0};
            for (std::size_t i = 0; i < data.size(); ++i) {
                (data.value(i, f) <= threshold ? left : right)[label_index(data.label(i))] += 1;
            }
            const double nl = left[0] + left[1];
            const double nr = right[0] + right[1];
            const double n = nl + nr;
            const double decrease = parent - nl / n * impurity(left[0], left[1]) - nr / n * impurity(right[0], right[1]);
            if (!best || decrease > best->decrease + 1e-12) {
                best = Split{f, threshold, decrease};
            }
        }
    }
    return best;
}

Label knn(const Dataset& data, std::span<const double> query, std::size_t k)
{
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> dist(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        double s = 0.0;
        for (std::size_t f = 0; f < query.size(); ++f) {
            s += (data.value(i, f) - query[f]) * (data.value(i, f) - query[f]);
        }
        dist[i] = std::sqrt(s);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
    std::size_t fight = 0;
    for (std::size_t i = 0; i < k; ++i) {
        fight += data.label(order[i]) == Label::Fight ? 1 : 0;
    }
    return 2 * fight > k ? Label::Fight : Label::NonFight;
}

Label nearest_centroid(const Dataset& train, std::span<const double> query)
{
    std::vector<double> centroid[2] = {std::vector<double>(train.dimension()), std::vector<double>(train.dimension())};
    double count[2] = {0, 0};
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto c = label_index(train.label(i));
        count[c] += 1;
        for (std::size_t f = 0; f < train.dimension(); ++f) {
            centroid[c][f] += train.value(i, f);
        }
    }
    double d[2] = {0, 0};
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t f = 0; f < train.dimension(); ++f) {
            const double m = centroid[c][f] / count[c];
            d[c] += (query[f] - m) * (query[f] - m);
        }
    }
    return d[1] < d[0] ? Label::Fight : Label::NonFight;
}

} // namespace oracle
