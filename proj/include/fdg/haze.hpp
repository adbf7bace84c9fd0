#pragma once
// Atmospheric scattering synthesis and dark-channel-prior transmission
// estimation. Drives both dataset generation and the per-patch timestep
// offsets of the diffusion sampler.

#include "fdg/image.hpp"

namespace fdg {

// Per-pixel transmission t(m,n) in (0,1]; stored as a single-channel image.
using TransmissionMap = ImageF32;

struct Airlight {
    float r = 0.0f, g = 0.0f, b = 0.0f;

    float channel(int c) const { return c == 0 ? r : (c == 1 ? g : b); }
};

struct HazeParams {
    double beta = 1.0;    // scattering coefficient per unit depth
    double omega = 0.95;  // DCP retention factor
    int window = 15;      // odd patch size for the dark channel
    double t_min = 0.05;  // lower clamp on estimated transmission
};

// Per pixel/channel: clear*t + a*(1-t), clamped to [0,1].
ImageF32 apply_asm(const ImageF32& clear, const TransmissionMap& t, const Airlight& a);

// min over window neighborhood of min over channels; windows clip at borders.
ImageF32 dark_channel(const ImageF32& img, int window);

// Mean color of the pixels holding the top 0.1% of dark-channel values
// (all pixels tied with the cutoff value are included).
Airlight estimate_airlight(const ImageF32& img, int window = 15);

// t = 1 - omega * dark_channel(img / a, window), clamped to [t_min, 1].
TransmissionMap estimate_transmission(const ImageF32& img, const Airlight& a, const HazeParams& p);

// t = exp(-beta * depth).
TransmissionMap transmission_from_depth(const ImageF32& depth, double beta);

}  // namespace fdg
