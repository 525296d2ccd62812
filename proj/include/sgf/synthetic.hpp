#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgf/common.hpp"
#include "sgf/events.hpp"

namespace sgf::events {

/// Counter-based pseudo-random source: value i of stream s is a pure
/// function of (seed, s, i), so generation order never changes results.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t next();
    /// Uniform in [0, 1).
    double uniform();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

enum class Trajectory {
    LinearDown,
    LinearUp,
    LinearLeft,
    LinearRight,
    CircularCw,
    CircularCcw,
    OscillateSmallArea,
    OscillateLargeArea,
};

std::string_view to_string(Trajectory t);
std::optional<Trajectory> parse_trajectory(std::string_view name);

/// Moving-blob gesture description. Rows grow downwards, so "cw" is clockwise
/// as seen on the rendered image.
struct SyntheticGestureSpec {
    Trajectory trajectory = Trajectory::LinearDown;
    double blob_radius = 4.0;
    std::uint32_t blob_rate = 1000;  // blob events per frame
    double noise_density = 0.0;      // probability per pixel per frame
    std::uint32_t frame_count = 60;
    Geometry geometry{64, 64};

    // Trajectory anchor and size. A non-positive extent selects the
    // per-trajectory default (half sweep length, circle radius or
    // oscillation amplitude).
    double center_x = 32.0;
    double center_y = 32.0;
    double extent = 0.0;
    double turns = 1.25;      // circular trajectories
    double cycles = 3.0;      // oscillating trajectories (small: vertical, large: horizontal)
    double phase = 0.0;       // start angle (radians) for circular trajectories
    std::uint32_t frame_period_us = 1000;
};

double default_extent(Trajectory t);

/// Throws DataError on a degenerate spec (zero geometry, no frames, ...).
void validate_spec(const SyntheticGestureSpec& spec);

/// Blob centroid at generator frame f.
std::array<double, 2> trajectory_point(const SyntheticGestureSpec& spec, std::uint32_t frame);

/// Stream plus ground truth: which events belong to the blob, and the
/// blob centroid of every generator frame.
struct SyntheticSample {
    EventStream stream;
    std::vector<bool> is_blob;
    std::vector<std::array<double, 2>> centroids;
    std::vector<std::size_t> frame_sizes;  // events emitted per generator frame
};

SyntheticSample gen_synthetic_sample(const SyntheticGestureSpec& spec, std::uint64_t seed);
EventStream gen_synthetic(const SyntheticGestureSpec& spec, std::uint64_t seed);

/// Settings of the ten-class synthetic stand-in for the DVS gesture set.
struct SuiteSettings {
    Geometry geometry{64, 64};
    double noise_density = 0.0;
    std::uint32_t min_frames = 50;
    std::uint32_t max_frames = 80;
    double center_jitter = 2.0;  // pixels, uniform in [-j, j]
    double blob_radius = 4.0;
    std::uint32_t blob_rate = 1000;
};

constexpr int kClassCount = 10;

/// Gesture names indexed by class id (1..10); index 0 is unused.
std::string_view gesture_name(int class_id);

/// Synthetic analog of gesture `class_id`, jittered deterministically by `seed`.
SyntheticGestureSpec suite_spec(int class_id, std::uint64_t seed, const SuiteSettings& settings);
EventStream suite_sample(int class_id, std::uint64_t seed, const SuiteSettings& settings);

}  // namespace sgf::events
