#pragma once

// Seeded synthetic BODY-25 skeleton videos. Fight clips put persons within
// reach of each other and swing limbs fast; NonFight clips walk slowly with
// separation.

#include "difem/pose.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace difem {

struct SynthParams {
    Label class_tag = Label::NonFight;
    std::size_t n_persons = 2;
    std::size_t n_frames = 150;
    double frame_width = 640.0;
    double frame_height = 360.0;
    double body_height = 180.0;    // pixels, neck-to-ankle scale of the template
    double velocity_scale = 2.0;   // typical per-frame limb displacement, pixels
    double proximity_scale = 0.1;  // 0 = far apart, 1 = bodies interpenetrating
    double drop_rate = 0.05;       // stationary fraction of missing keypoints
    std::uint64_t seed = 0;
};

// Preset constants.
inline constexpr double kFightVelocityScale = 15.0;
inline constexpr double kFightProximityScale = 0.8;
inline constexpr double kNonFightVelocityScale = 2.0;
inline constexpr double kNonFightProximityScale = 0.1;

SynthParams fight_preset(std::uint64_t seed);
SynthParams nonfight_preset(std::uint64_t seed);
SynthParams preset(Label label, std::uint64_t seed);

// Throws ConfigError on invalid params.
VideoPoseSequence generate(const SynthParams& params);

struct SynthCorpusSpec {
    std::size_t n_fight = 100;
    std::size_t n_nonfight = 100;
    std::size_t n_frames = 150;
    std::size_t n_persons = 2;
    std::uint64_t seed = 42;
};

// Video i of class c uses preset(c, derive_seed(seed, 2 * i + c)); fight
// videos come first. Ids are "fight_%04zu" / "nonfight_%04zu".
std::vector<VideoPoseSequence> generate_corpus(const SynthCorpusSpec& spec);

// Writes one frame-file directory per video plus `manifest.csv` under `root`.
void write_corpus(const std::vector<VideoPoseSequence>& videos, const std::filesystem::path& root);

} // namespace difem
