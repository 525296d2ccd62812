#include "sgf/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sgf::events {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Generator stream ids; each frame gets its own block of streams.
constexpr std::uint64_t kBlobStream = 1;
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kShuffleStream = 3;
constexpr std::uint64_t kSuiteStream = 0x5157;

struct TrajectoryName {
    Trajectory kind;
    std::string_view name;
};

constexpr TrajectoryName kTrajectoryNames[] = {
    {Trajectory::LinearDown, "linear-down"},
    {Trajectory::LinearUp, "linear-up"},
    {Trajectory::LinearLeft, "linear-left"},
    {Trajectory::LinearRight, "linear-right"},
    {Trajectory::CircularCw, "circular-cw"},
    {Trajectory::CircularCcw, "circular-ccw"},
    {Trajectory::OscillateSmallArea, "oscillate-small-area"},
    {Trajectory::OscillateLargeArea, "oscillate-large-area"},
};

}  // namespace

std::uint64_t CounterRng::mix(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

std::uint64_t CounterRng::next() { return mix(seed_, stream_, counter_++); }

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t CounterRng::below(std::uint64_t bound) {
    // Lemire's multiply-shift; the bias is below 2^-32 for the bounds used here.
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
}

std::string_view to_string(Trajectory t) {
    for (const auto& entry : kTrajectoryNames) {
        if (entry.kind == t) {
            return entry.name;
        }
    }
    return "unknown";
}

std::optional<Trajectory> parse_trajectory(std::string_view name) {
    for (const auto& entry : kTrajectoryNames) {
        if (entry.name == name) {
            return entry.kind;
        }
    }
    return std::nullopt;
}

double default_extent(Trajectory t) {
    switch (t) {
        case Trajectory::LinearDown:
        case Trajectory::LinearUp:
        case Trajectory::LinearLeft:
        case Trajectory::LinearRight:
            return 18.0;
        case Trajectory::CircularCw:
        case Trajectory::CircularCcw:
            return 10.0;
        case Trajectory::OscillateSmallArea:
            return 2.0;
        case Trajectory::OscillateLargeArea:
            return 12.0;
    }
    return 0.0;
}

void validate_spec(const SyntheticGestureSpec& spec) {
    if (spec.geometry.empty()) {
        throw DataError("synthetic spec: geometry must be non-empty");
    }
    if (spec.frame_count == 0) {
        throw DataError("synthetic spec: frame_count must be positive");
    }
    if (!(spec.blob_radius >= 0.0)) {
        throw DataError("synthetic spec: blob_radius must be non-negative");
    }
    if (!(spec.noise_density >= 0.0 && spec.noise_density <= 1.0)) {
        throw DataError("synthetic spec: noise_density must lie in [0, 1]");
    }
    if (spec.frame_period_us == 0) {
        throw DataError("synthetic spec: frame_period_us must be positive");
    }
}

std::array<double, 2> trajectory_point(const SyntheticGestureSpec& spec, std::uint32_t frame) {
    const double extent = spec.extent > 0.0 ? spec.extent : default_extent(spec.trajectory);
    const double u =
        spec.frame_count > 1 ? static_cast<double>(frame) / (spec.frame_count - 1) : 0.0;
    const double cx = spec.center_x;
    const double cy = spec.center_y;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    switch (spec.trajectory) {
        case Trajectory::LinearDown:
            return {cx, cy - extent + 2.0 * extent * u};
        case Trajectory::LinearUp:
            return {cx, cy + extent - 2.0 * extent * u};
        case Trajectory::LinearLeft:
            return {cx + extent - 2.0 * extent * u, cy};
        case Trajectory::LinearRight:
            return {cx - extent + 2.0 * extent * u, cy};
        case Trajectory::CircularCw: {
            // Angle grows with y pointing down: clockwise on screen.
            const double a = spec.phase + two_pi * spec.turns * u;
            return {cx + extent * std::cos(a), cy + extent * std::sin(a)};
        }
        case Trajectory::CircularCcw: {
            const double a = spec.phase + two_pi * spec.turns * u;
            return {cx + extent * std::cos(a), cy - extent * std::sin(a)};
        }
        case Trajectory::OscillateSmallArea:
            return {cx, cy + extent * std::sin(two_pi * spec.cycles * u)};
        case Trajectory::OscillateLargeArea:
            return {cx + extent * std::sin(two_pi * spec.cycles * u), cy};
    }
    return {cx, cy};
}

SyntheticSample gen_synthetic_sample(const SyntheticGestureSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    const Geometry g = spec.geometry;

    SyntheticSample sample;
    sample.stream.geometry = g;
    sample.centroids.reserve(spec.frame_count);
    sample.frame_sizes.reserve(spec.frame_count);

    struct Pending {
        std::uint16_t x;
        std::uint16_t y;
        std::int8_t polarity;
        bool blob;
    };
    std::vector<Pending> frame_events;

    auto clamp_coord = [](double v, std::uint32_t limit) {
        const double r = std::round(v);
        return static_cast<std::uint16_t>(std::clamp(r, 0.0, static_cast<double>(limit - 1)));
    };

    for (std::uint32_t f = 0; f < spec.frame_count; ++f) {
        frame_events.clear();
        const auto c = trajectory_point(spec, f);
        sample.centroids.push_back(c);

        CounterRng blob(seed, (std::uint64_t{f} << 8) | kBlobStream);
        for (std::uint32_t k = 0; k < spec.blob_rate; ++k) {
            const double rho = spec.blob_radius * std::sqrt(blob.uniform());
            const double phi = 2.0 * std::numbers::pi * blob.uniform();
            const std::int8_t pol = (blob.next() & 1) ? 1 : -1;
            frame_events.push_back({clamp_coord(c[0] + rho * std::cos(phi), g.width),
                                    clamp_coord(c[1] + rho * std::sin(phi), g.height), pol, true});
        }

        if (spec.noise_density > 0.0) {
            CounterRng noise(seed, (std::uint64_t{f} << 8) | kNoiseStream);
            for (std::uint32_t y = 0; y < g.height; ++y) {
                for (std::uint32_t x = 0; x < g.width; ++x) {
                    const std::uint64_t draw = noise.next();
                    if (static_cast<double>(draw >> 11) * 0x1.0p-53 < spec.noise_density) {
                        frame_events.push_back({static_cast<std::uint16_t>(x),
                                                static_cast<std::uint16_t>(y),
                                                static_cast<std::int8_t>((draw & 1) ? 1 : -1),
                                                false});
                    }
                }
            }
        }

        CounterRng shuffle(seed, (std::uint64_t{f} << 8) | kShuffleStream);
        for (std::size_t i = frame_events.size(); i > 1; --i) {
            std::swap(frame_events[i - 1], frame_events[shuffle.below(i)]);
        }

        const std::uint64_t n = frame_events.size();
        sample.frame_sizes.push_back(frame_events.size());
        for (std::uint64_t k = 0; k < n; ++k) {
            const auto& p = frame_events[k];
            const std::uint64_t t =
                std::uint64_t{f} * spec.frame_period_us + k * spec.frame_period_us / n;
            sample.stream.events.push_back({t, p.x, p.y, p.polarity});
            sample.is_blob.push_back(p.blob);
        }
    }
    return sample;
}

EventStream gen_synthetic(const SyntheticGestureSpec& spec, std::uint64_t seed) {
    return gen_synthetic_sample(spec, seed).stream;
}

std::string_view gesture_name(int class_id) {
    static constexpr std::string_view names[] = {
        "",
        "hand clap",
        "left hand wave",
        "right hand wave",
        "right arm clockwise",
        "right arm counter clockwise",
        "left arm clockwise",
        "left arm counter clockwise",
        "arm roll",
        "air drum",
        "air guitar",
    };
    if (class_id < 1 || class_id > kClassCount) {
        return "unknown";
    }
    return names[class_id];
}

SyntheticGestureSpec suite_spec(int class_id, std::uint64_t seed, const SuiteSettings& settings) {
    if (class_id < 1 || class_id > kClassCount) {
        throw DataError("synthetic suite: class id " + std::to_string(class_id) +
                        " outside 1..10");
    }
    const double w = settings.geometry.width;
    const double h = settings.geometry.height;

    SyntheticGestureSpec spec;
    spec.geometry = settings.geometry;
    spec.blob_radius = settings.blob_radius;
    spec.blob_rate = settings.blob_rate;
    spec.noise_density = settings.noise_density;

    // Anchors are fractions of the geometry so the suite scales with it.
    struct Layout {
        Trajectory kind;
        double fx;
        double fy;
    };
    static constexpr Layout layouts[] = {
        {Trajectory::LinearDown, 0.0, 0.0},                // unused slot 0
        {Trajectory::OscillateSmallArea, 0.50, 0.72},      // 1 hand clap
        {Trajectory::OscillateSmallArea, 0.22, 0.30},      // 2 left hand wave
        {Trajectory::OscillateSmallArea, 0.78, 0.30},      // 3 right hand wave
        {Trajectory::CircularCw, 0.74, 0.50},              // 4 right arm cw
        {Trajectory::CircularCcw, 0.74, 0.50},             // 5 right arm ccw
        {Trajectory::CircularCw, 0.26, 0.50},              // 6 left arm cw
        {Trajectory::CircularCcw, 0.26, 0.50},             // 7 left arm ccw
        {Trajectory::OscillateLargeArea, 0.50, 0.50},      // 8 arm roll
        {Trajectory::LinearDown, 0.50, 0.50},              // 9 air drum
        {Trajectory::LinearRight, 0.50, 0.22},             // 10 air guitar
    };
    const Layout& layout = layouts[class_id];
    spec.trajectory = layout.kind;

    CounterRng rng(seed, kSuiteStream + static_cast<std::uint64_t>(class_id));
    const double j = settings.center_jitter;
    spec.center_x = layout.fx * w + (2.0 * rng.uniform() - 1.0) * j;
    spec.center_y = layout.fy * h + (2.0 * rng.uniform() - 1.0) * j;
    const std::uint32_t span = settings.max_frames >= settings.min_frames
                                   ? settings.max_frames - settings.min_frames + 1
                                   : 1;
    spec.frame_count = settings.min_frames + static_cast<std::uint32_t>(rng.below(span));
    spec.phase = 2.0 * std::numbers::pi * rng.uniform();
    spec.extent = default_extent(layout.kind) * (0.9 + 0.2 * rng.uniform()) *
                  std::min(w, h) / 64.0;
    if (layout.kind == Trajectory::OscillateLargeArea) {
        // keep the sweep under ~2.5 px/frame so a 2-frame window still
        // overlaps the blob's previous position
        spec.cycles = 2.0;
    }
    return spec;
}

EventStream suite_sample(int class_id, std::uint64_t seed, const SuiteSettings& settings) {
    auto stream = gen_synthetic(suite_spec(class_id, seed, settings), seed);
    stream.label = class_id;
    return stream;
}

}  // namespace sgf::events
