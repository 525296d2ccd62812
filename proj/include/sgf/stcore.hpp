#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgf/common.hpp"
#include "sgf/events.hpp"

namespace sgf::stcore {

/// Spatiotemporal core thresholds.
///
/// A pixel passes the spatial stage when the events inside the square window
/// of side `delta_s + 1` anchored at it (extending towards +x and +y, clipped
/// at the borders) reach `theta_s`. It fires when it passed the spatial stage
/// in at least `theta_t` of the last `delta_t` frames.
struct STCoreParams {
    int delta_s = 1;
    int theta_s = 1;
    int delta_t = 2;
    int theta_t = 2;
    /// Sum signed polarities instead of event magnitudes in the spatial stage.
    bool signed_sum = false;

    friend bool operator==(const STCoreParams&, const STCoreParams&) = default;
};

/// Throws ConfigError for impossible values (negative window, zero threshold).
void validate(const STCoreParams& params);

/// Non-fatal findings, e.g. theta_t > delta_t which silences the core.
std::vector<std::string> warnings(const STCoreParams& params);

BinaryGrid spatial_stage(const events::Frame& frame, int delta_s, int theta_s,
                         bool signed_sum = false);

/// `window` holds the spatial-stage grids of frames (t - delta_t, t], oldest
/// first. Returns the all-zero grid if fewer than `delta_t` grids are given.
BinaryGrid temporal_stage(std::span<const BinaryGrid> window, int delta_t, int theta_t);

/// Applies both stages to every frame. Output has one grid per input frame;
/// the first delta_t - 1 grids are all-zero warm-up frames.
std::vector<BinaryGrid> st_filter(std::span<const events::Frame> frames, const STCoreParams& params);

}  // namespace sgf::stcore
