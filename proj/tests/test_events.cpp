#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "sgf/events.hpp"
#include "sgf/synthetic.hpp"
#include "support.hpp"

using namespace sgf;
using namespace sgf::events;

namespace {

std::string error_of(std::string_view text, Geometry g) {
    try {
        parse_event_stream(text, g);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

/// Mean position of the events of generator frame f.
std::array<double, 2> centroid(const SyntheticSample& s, std::size_t f) {
    std::size_t begin = 0;
    for (std::size_t i = 0; i < f; ++i) {
        begin += s.frame_sizes[i];
    }
    double x = 0, y = 0;
    for (std::size_t i = begin; i < begin + s.frame_sizes[f]; ++i) {
        x += s.stream.events[i].x;
        y += s.stream.events[i].y;
    }
    const double n = static_cast<double>(s.frame_sizes[f]);
    return {x / n, y / n};
}

}  // namespace

TEST_CASE("parse: empty text gives an empty stream") {
    const auto s = parse_event_stream("", {128, 128});
    CHECK(s.events.empty());
}

TEST_CASE("parse: one record maps field by field") {
    const auto s = parse_event_stream("5,3,4,1", {128, 128});
    REQUIRE(s.events.size() == 1);
    CHECK(s.events[0] == SpikeEvent{5, 3, 4, 1});
}

TEST_CASE("parse: polarity 0 maps to -1") {
    const auto s = parse_event_stream("1,0,0,0\n2,0,0,1\n3,0,0,-1\n", {4, 4});
    CHECK(s.events[0].polarity == -1);
    CHECK(s.events[1].polarity == 1);
    CHECK(s.events[2].polarity == -1);
}

TEST_CASE("parse: errors name the line") {
    const Geometry g{8, 8};
    CHECK(error_of("1,1,1,1\n2,1,1\n", g).find("line 2") != std::string::npos);
    CHECK(error_of("1,1,1,1\n2,1,x,1\n", g).find("line 2") != std::string::npos);
    CHECK(error_of("1,8,1,1\n", g).find("line 1") != std::string::npos);
    CHECK(error_of("5,1,1,1\n4,1,1,1\n", g).find("line 2") != std::string::npos);
    CHECK(error_of("1,1,1,2\n", g).find("line 1") != std::string::npos);
    CHECK_THROWS_AS(parse_event_stream("", {0, 4}), DataError);
}

TEST_CASE("parse/serialize round trip is byte-identical on an 80,000-event file") {
    SyntheticGestureSpec spec;
    spec.trajectory = Trajectory::CircularCw;
    spec.blob_rate = 1000;
    spec.frame_count = 80;
    spec.geometry = {128, 128};
    spec.center_x = spec.center_y = 64;
    const auto stream = gen_synthetic(spec, 11);
    REQUIRE(stream.events.size() == 80000);
    const std::string text = serialize_event_stream(stream);
    const auto back = parse_event_stream(text, spec.geometry);
    CHECK(back.events == stream.events);
    CHECK(serialize_event_stream(back) == text);
}

TEST_CASE("bin_frames: floor arithmetic and conservation") {
    EventStream s;
    s.geometry = {16, 16};
    oracle::Rng rng(3);
    for (std::uint64_t i = 0; i < 2500; ++i) {
        s.events.push_back({i, static_cast<std::uint16_t>(rng.range(0, 15)), static_cast<std::uint16_t>(rng.range(0, 15)),
                            static_cast<std::int8_t>(rng.chance(0.5) ? 1 : -1)});
    }
    const auto frames = bin_frames(s, 1000);
    CHECK(frames.size() == 2);
    for (const auto& f : frames) {
        CHECK(f.event_count() == 1000);
        CHECK(f.grid.geometry() == s.geometry);
    }
    CHECK(bin_frames(EventStream{{4, 4}, {}, {}}).empty());
    CHECK_THROWS_AS(bin_frames(s, 0), DataError);
}

TEST_CASE("bin_frames: 50,000 generated events give 50 frames of 1000") {
    SyntheticGestureSpec spec;
    spec.frame_count = 50;
    const auto stream = gen_synthetic(spec, 5);
    REQUIRE(stream.events.size() == 50000);
    const auto frames = bin_frames(stream);
    REQUIRE(frames.size() == 50);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        // count oracle straight from the event list
        CountGrid mag(stream.geometry, 0);
        for (std::size_t i = f * 1000; i < (f + 1) * 1000; ++i) {
            mag.at(stream.events[i].x, stream.events[i].y) += 1;
        }
        CHECK(frames[f].magnitude == mag);
        CHECK(frames[f].event_count() == 1000);
    }
}

TEST_CASE("bin_frames property: mass is spikes_per_frame times frame count") {
    oracle::Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        EventStream s;
        s.geometry = {8, 8};
        const int n = rng.range(0, 300);
        for (int i = 0; i < n; ++i) {
            s.events.push_back({static_cast<std::uint64_t>(i), static_cast<std::uint16_t>(rng.range(0, 7)),
                                static_cast<std::uint16_t>(rng.range(0, 7)), 1});
        }
        const std::size_t spf = static_cast<std::size_t>(rng.range(1, 40));
        const auto frames = bin_frames(s, spf);
        CHECK(frames.size() == static_cast<std::size_t>(n) / spf);
        std::int64_t mass = 0;
        for (const auto& f : frames) {
            mass += f.event_count();
        }
        CHECK(mass == static_cast<std::int64_t>(spf * frames.size()));
    }
}

TEST_CASE("synthetic: same spec and seed give identical events") {
    SyntheticGestureSpec spec;
    spec.noise_density = 0.02;
    CHECK(gen_synthetic(spec, 9).events == gen_synthetic(spec, 9).events);
    CHECK(gen_synthetic(spec, 9).events != gen_synthetic(spec, 10).events);
}

TEST_CASE("synthetic: linear-down centroid row strictly increases") {
    SyntheticGestureSpec spec;
    spec.trajectory = Trajectory::LinearDown;
    const auto s = gen_synthetic_sample(spec, 21);
    for (std::size_t f = 1; f < spec.frame_count; ++f) {
        CHECK(centroid(s, f)[1] > centroid(s, f - 1)[1]);
    }
}

TEST_CASE("synthetic: circular-ccw phase increases monotonically mod 2pi") {
    SyntheticGestureSpec spec;
    spec.trajectory = Trajectory::CircularCcw;
    const auto s = gen_synthetic_sample(spec, 4);
    // Rows grow downwards, so counter-clockwise on the image means the
    // angle measured with y flipped increases.
    auto phase = [&](std::size_t f) {
        const auto c = centroid(s, f);
        return std::atan2(-(c[1] - spec.center_y), c[0] - spec.center_x);
    };
    for (std::size_t f = 1; f < spec.frame_count; ++f) {
        double d = phase(f) - phase(f - 1);
        if (d < 0) {
            d += 2 * std::numbers::pi;
        }
        CHECK(d > 0.0);
        CHECK(d < std::numbers::pi);
    }
}

TEST_CASE("synthetic: noise-free events stay within the blob radius") {
    for (auto kind : {Trajectory::LinearUp, Trajectory::CircularCw, Trajectory::OscillateLargeArea}) {
        SyntheticGestureSpec spec;
        spec.trajectory = kind;
        const auto s = gen_synthetic_sample(spec, 2);
        std::size_t i = 0;
        for (std::size_t f = 0; f < spec.frame_count; ++f) {
            const auto c = s.centroids[f];
            for (std::size_t k = 0; k < s.frame_sizes[f]; ++k, ++i) {
                const auto& e = s.stream.events[i];
                // rounding to the pixel grid moves a point by at most sqrt(2)/2
                CHECK(std::hypot(e.x - c[0], e.y - c[1]) <= spec.blob_radius + 0.75);
                CHECK(s.is_blob[i]);
            }
        }
    }
}

TEST_CASE("synthetic: noise density is respected and spread over the grid") {
    SyntheticGestureSpec spec;
    spec.noise_density = 0.05;
    spec.frame_count = 50;
    const auto s = gen_synthetic_sample(spec, 8);
    std::size_t noise = 0;
    std::size_t left = 0;
    for (std::size_t i = 0; i < s.is_blob.size(); ++i) {
        if (!s.is_blob[i]) {
            ++noise;
            left += s.stream.events[i].x < 32;
        }
    }
    const double expected = 0.05 * 64 * 64 * 50;
    CHECK(std::abs(static_cast<double>(noise) - expected) < 0.05 * expected);
    CHECK(std::abs(static_cast<double>(left) / static_cast<double>(noise) - 0.5) < 0.03);
}

TEST_CASE("synthetic: degenerate geometry is rejected") {
    SyntheticGestureSpec spec;
    spec.geometry = {0, 64};
    CHECK_THROWS_AS(gen_synthetic(spec, 1), DataError);
}

TEST_CASE("suite: frame counts in range and classes labelled") {
    for (int c = 1; c <= kClassCount; ++c) {
        const auto spec = suite_spec(c, 99, {});
        CHECK(spec.frame_count >= 50);
        CHECK(spec.frame_count <= 80);
        CHECK(suite_sample(c, 99, {}).label == c);
    }
    CHECK_THROWS_AS(suite_spec(11, 1, {}), DataError);
}

TEST_CASE("loader hook: registered extension is used") {
    register_loader(".fake", [](const std::filesystem::path&, Geometry g) {
        EventStream s;
        s.geometry = g;
        s.events.push_back({1, 2, 3, 1});
        return s;
    });
    const auto s = load_event_file("nowhere.fake", {8, 8});
    CHECK(s.events.size() == 1);
    CHECK_THROWS_AS(load_event_file("/nonexistent/file.csv", {8, 8}), DataError);
}
