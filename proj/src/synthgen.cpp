#include "difem/synthgen.hpp"

#include "difem/errors.hpp"
#include "difem/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace difem {

namespace {

struct Offset {
    double x;
    double y;
};

// Standing BODY-25 skeleton in body-height units, origin at the mid hip,
// y pointing down, person facing the camera (its right side at negative x).
constexpr std::array<Offset, kBody25Keypoints> kTemplate{{
    {0.00, -0.47},  // 0 nose
    {0.00, -0.38},  // 1 neck
    {-0.11, -0.37}, // 2 right shoulder
    {-0.14, -0.22}, // 3 right elbow
    {-0.15, -0.08}, // 4 right wrist
    {0.11, -0.37},  // 5 left shoulder
    {0.14, -0.22},  // 6 left elbow
    {0.15, -0.08},  // 7 left wrist
    {0.00, 0.00},   // 8 mid hip
    {-0.06, 0.00},  // 9 right hip
    {-0.07, 0.24},  // 10 right knee
    {-0.07, 0.47},  // 11 right ankle
    {0.06, 0.00},   // 12 left hip
    {0.07, 0.24},   // 13 left knee
    {0.07, 0.47},   // 14 left ankle
    {-0.02, -0.49}, // 15 right eye
    {0.02, -0.49},  // 16 left eye
    {-0.05, -0.48}, // 17 right ear
    {0.05, -0.48},  // 18 left ear
    {0.10, 0.50},   // 19 left big toe
    {0.12, 0.49},   // 20 left small toe
    {0.06, 0.49},   // 21 left heel
    {-0.10, 0.50},  // 22 right big toe
    {-0.12, 0.49},  // 23 right small toe
    {-0.06, 0.49},  // 24 right heel
}};

// Horizontal body extent of the template in body-height units.
constexpr double kBodyWidth = 0.30;

enum class Limb { Torso, Head, RightArm, LeftArm, RightLeg, LeftLeg };

constexpr std::array<Limb, kBody25Keypoints> kLimbOf{{
    Limb::Head, Limb::Torso, Limb::Torso, Limb::RightArm, Limb::RightArm,
    Limb::Torso, Limb::LeftArm, Limb::LeftArm, Limb::Torso, Limb::Torso,
    Limb::RightLeg, Limb::RightLeg, Limb::Torso, Limb::LeftLeg, Limb::LeftLeg,
    Limb::Head, Limb::Head, Limb::Head, Limb::Head, Limb::LeftLeg,
    Limb::LeftLeg, Limb::LeftLeg, Limb::RightLeg, Limb::RightLeg, Limb::RightLeg,
}};

// How far along its limb a keypoint sits (wrist / ankle = 1).
constexpr std::array<double, kBody25Keypoints> kLimbReach{{
    0.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.5, 1.0, 0.0,
    0.5, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0,
}};

constexpr std::size_t kLimbCount = 6;
constexpr double kDropBurstEnd = 0.05;  // mean missing burst of 20 frames

struct LimbMotion {
    double amplitude;  // pixels at reach 1
    double omega;      // radians per frame
    double phase;
    double dir_x;      // unit swing direction
    double dir_y;
};

struct PersonState {
    double x;          // mid-hip position
    double y;
    double vx;         // drift per frame
    double facing;     // +1 faces right, -1 faces left
    double body_bob;   // torso oscillation amplitude
    double bob_omega;
    double bob_phase;
    std::array<LimbMotion, kLimbCount> limbs;
    std::array<bool, kBody25Keypoints> dropped;
};

void validate(const SynthParams& p)
{
    if (p.n_persons < 1) {
        throw ConfigError("synthetic video needs at least one person");
    }
    if (p.n_frames < 2) {
        throw ConfigError("synthetic video needs at least two frames");
    }
    if (!(p.frame_width > 0.0) || !(p.frame_height > 0.0)) {
        throw ConfigError("frame size must be positive");
    }
    if (!(p.body_height > 0.0) || p.body_height > p.frame_height) {
        throw ConfigError("body height must be positive and fit in the frame");
    }
    if (!(p.velocity_scale >= 0.0) || !std::isfinite(p.velocity_scale)) {
        throw ConfigError("velocity_scale must be a finite value >= 0");
    }
    if (!(p.proximity_scale >= 0.0 && p.proximity_scale <= 1.0)) {
        throw ConfigError("proximity_scale must lie in [0, 1]");
    }
    if (!(p.drop_rate >= 0.0 && p.drop_rate < 1.0)) {
        throw ConfigError("drop_rate must lie in [0, 1)");
    }
}

// Peak speed of a sinusoid is amplitude * omega; choose the amplitude that
// gives `speed` at the limb tip.
LimbMotion limb_motion(Rng& rng, double speed, double omega, double dir_x, double dir_y)
{
    return {omega > 0.0 ? speed / omega : 0.0, omega, rng.uniform(0.0, 2.0 * std::numbers::pi), dir_x, dir_y};
}

std::vector<PersonState> initial_fight(const SynthParams& p, Rng& rng)
{
    const double h = p.body_height;
    const double v = p.velocity_scale * rng.uniform(0.7, 1.3);
    const double engagement = rng.uniform(0.5, 1.2);
    const double separation = kBodyWidth * h * (2.0 - 1.5 * p.proximity_scale * engagement);

    std::vector<PersonState> persons(p.n_persons);
    const double centre = p.frame_width / 2.0;
    for (std::size_t i = 0; i < p.n_persons; ++i) {
        PersonState& s = persons[i];
        const double slot = static_cast<double>(i) - static_cast<double>(p.n_persons - 1) / 2.0;
        s.x = centre + slot * separation + rng.normal() * 0.02 * h;
        s.y = p.frame_height * 0.55 + rng.normal() * 0.02 * h;
        s.vx = 0.0;
        s.facing = slot < 0.0 ? 1.0 : -1.0;
        s.body_bob = 0.3 * v / 0.4;
        s.bob_omega = 0.4;
        s.bob_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        // Punches towards the opponent, kicks lower and slower. The forward-only
        // swing (0.5 + 0.5 sin) halves the tip speed, hence the factor 2.
        const double punch = 2.0 * std::numbers::pi / rng.uniform(6.0, 10.0);
        const double kick = 2.0 * std::numbers::pi / rng.uniform(10.0, 16.0);
        s.limbs[static_cast<std::size_t>(Limb::Torso)] = {0.0, 0.0, 0.0, 0.0, 0.0};
        s.limbs[static_cast<std::size_t>(Limb::Head)] = {0.0, 0.0, 0.0, 0.0, 0.0};
        s.limbs[static_cast<std::size_t>(Limb::RightArm)] = limb_motion(rng, 3.0 * v, punch, s.facing, -0.3);
        s.limbs[static_cast<std::size_t>(Limb::LeftArm)] = limb_motion(rng, 3.0 * v, punch, s.facing, -0.3);
        s.limbs[static_cast<std::size_t>(Limb::RightLeg)] = limb_motion(rng, 1.2 * v, kick, s.facing, -0.5);
        s.limbs[static_cast<std::size_t>(Limb::LeftLeg)] = limb_motion(rng, 1.2 * v, kick, s.facing, -0.5);
    }
    return persons;
}

std::vector<PersonState> initial_nonfight(const SynthParams& p, Rng& rng)
{
    const double h = p.body_height;
    const double v = p.velocity_scale * rng.uniform(0.7, 1.3);
    const double min_gap = kBodyWidth * h * (2.0 - 1.5 * p.proximity_scale);
    const double margin = kBodyWidth * h;

    std::vector<PersonState> persons(p.n_persons);
    for (std::size_t i = 0; i < p.n_persons; ++i) {
        PersonState& s = persons[i];
        // Spread persons out, keeping at least min_gap between neighbours
        // where the frame allows it.
        const double lane = (p.frame_width - 2.0 * margin) / static_cast<double>(p.n_persons);
        s.x = margin + lane * (static_cast<double>(i) + 0.5) +
              rng.uniform(-0.5, 0.5) * std::max(0.0, lane - min_gap);
        s.y = p.frame_height * 0.55 + rng.normal() * 0.03 * h;
        s.facing = rng.bernoulli(0.5) ? 1.0 : -1.0;
        s.vx = s.facing * v * rng.uniform(0.3, 1.0);
        const double stride = 2.0 * std::numbers::pi / rng.uniform(24.0, 36.0);
        s.body_bob = 0.2 * v / stride;
        s.bob_omega = 2.0 * stride;
        s.bob_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        s.limbs[static_cast<std::size_t>(Limb::Torso)] = {0.0, 0.0, 0.0, 0.0, 0.0};
        s.limbs[static_cast<std::size_t>(Limb::Head)] = {0.0, 0.0, 0.0, 0.0, 0.0};
        s.limbs[static_cast<std::size_t>(Limb::RightArm)] = limb_motion(rng, v, stride, 1.0, 0.0);
        s.limbs[static_cast<std::size_t>(Limb::LeftArm)] = limb_motion(rng, v, stride, 1.0, 0.0);
        s.limbs[static_cast<std::size_t>(Limb::RightLeg)] = limb_motion(rng, v, stride, 1.0, 0.0);
        s.limbs[static_cast<std::size_t>(Limb::LeftLeg)] = limb_motion(rng, v, stride, 1.0, 0.0);
        // Arms and legs swing in anti-phase while walking.
        s.limbs[static_cast<std::size_t>(Limb::LeftArm)].phase =
            s.limbs[static_cast<std::size_t>(Limb::RightArm)].phase + std::numbers::pi;
        s.limbs[static_cast<std::size_t>(Limb::RightLeg)].phase =
            s.limbs[static_cast<std::size_t>(Limb::RightArm)].phase + std::numbers::pi;
        s.limbs[static_cast<std::size_t>(Limb::LeftLeg)].phase =
            s.limbs[static_cast<std::size_t>(Limb::RightArm)].phase;
    }
    return persons;
}

// Bounces a drifting coordinate back and forth inside [lo, hi].
double reflect(double x, double lo, double hi)
{
    const double span = hi - lo;
    if (!(span > 0.0)) {
        return lo;
    }
    double u = std::fmod(x - lo, 2.0 * span);
    if (u < 0.0) {
        u += 2.0 * span;
    }
    return lo + (u <= span ? u : 2.0 * span - u);
}

} // namespace

SynthParams fight_preset(std::uint64_t seed)
{
    SynthParams p;
    p.class_tag = Label::Fight;
    p.velocity_scale = kFightVelocityScale;
    p.proximity_scale = kFightProximityScale;
    p.seed = seed;
    return p;
}

SynthParams nonfight_preset(std::uint64_t seed)
{
    SynthParams p;
    p.class_tag = Label::NonFight;
    p.velocity_scale = kNonFightVelocityScale;
    p.proximity_scale = kNonFightProximityScale;
    p.seed = seed;
    return p;
}

SynthParams preset(Label label, std::uint64_t seed)
{
    return label == Label::Fight ? fight_preset(seed) : nonfight_preset(seed);
}

VideoPoseSequence generate(const SynthParams& params)
{
    validate(params);
    Rng rng(params.seed);
    std::vector<PersonState> persons =
        params.class_tag == Label::Fight ? initial_fight(params, rng) : initial_nonfight(params, rng);

    const double drop_start =
        params.drop_rate > 0.0 ? params.drop_rate * kDropBurstEnd / (1.0 - params.drop_rate) : 0.0;
    for (PersonState& s : persons) {
        for (bool& d : s.dropped) {
            d = rng.bernoulli(params.drop_rate);
        }
    }

    const double h = params.body_height;
    const double jitter = 0.25 * params.velocity_scale;
    const double x_max = params.frame_width - 1.0;
    const double y_max = params.frame_height - 1.0;
    const double margin = kBodyWidth * h;

    VideoPoseSequence seq;
    seq.label = params.class_tag;
    seq.frames.reserve(params.n_frames);
    for (std::size_t t = 0; t < params.n_frames; ++t) {
        const double time = static_cast<double>(t);
        FramePoses frame;
        frame.frame_index = t;
        for (PersonState& s : persons) {
            const double cx = reflect(s.x + s.vx * time, margin, params.frame_width - margin);
            const double cy = s.y + s.body_bob * std::sin(s.bob_omega * time + s.bob_phase);
            PersonPose person;
            for (std::size_t k = 0; k < kBody25Keypoints; ++k) {
                const LimbMotion& limb = s.limbs[static_cast<std::size_t>(kLimbOf[k])];
                // Fighters swing forward only; walkers swing both ways.
                double swing = std::sin(limb.omega * time + limb.phase);
                if (params.class_tag == Label::Fight) {
                    swing = 0.5 + 0.5 * swing;
                }
                const double reach = kLimbReach[k] * limb.amplitude * swing;
                // Mirror the template when the person faces left.
                const double tx = kTemplate[k].x * h * (s.facing > 0.0 ? 1.0 : -1.0);
                double x = cx + tx + reach * limb.dir_x + jitter * rng.normal();
                double y = cy + kTemplate[k].y * h + reach * limb.dir_y + jitter * rng.normal();
                x = std::clamp(x, 1.0, x_max);
                y = std::clamp(y, 1.0, y_max);
                const double confidence = rng.uniform(0.4, 1.0);

                bool& dropped = s.dropped[k];
                dropped = dropped ? !rng.bernoulli(kDropBurstEnd) : rng.bernoulli(drop_start);
                person.keypoints[k] = dropped ? Keypoint{} : Keypoint{x, y, confidence};
            }
            frame.persons.push_back(person);
        }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

std::vector<VideoPoseSequence> generate_corpus(const SynthCorpusSpec& spec)
{
    std::vector<VideoPoseSequence> videos;
    videos.reserve(spec.n_fight + spec.n_nonfight);
    for (Label label : {Label::Fight, Label::NonFight}) {
        const std::size_t count = label == Label::Fight ? spec.n_fight : spec.n_nonfight;
        for (std::size_t i = 0; i < count; ++i) {
            SynthParams p = preset(label, derive_seed(spec.seed, 2 * i + label_index(label)));
            p.n_frames = spec.n_frames;
            p.n_persons = spec.n_persons;
            VideoPoseSequence video = generate(p);
            char id[32];
            std::snprintf(id, sizeof id, "%s_%04zu", label == Label::Fight ? "fight" : "nonfight", i);
            video.video_id = id;
            videos.push_back(std::move(video));
        }
    }
    return videos;
}

void write_corpus(const std::vector<VideoPoseSequence>& videos, const std::filesystem::path& root)
{
    std::filesystem::create_directories(root);
    std::vector<std::pair<std::string, Label>> rows;
    for (const VideoPoseSequence& video : videos) {
        if (!video.label) {
            throw ConfigError("video " + video.video_id + " has no label");
        }
        write_video_dir(video, root / video.video_id, video.video_id);
        rows.emplace_back(video.video_id, *video.label);
    }
    write_manifest(root / "manifest.csv", rows);
}

} // namespace difem
