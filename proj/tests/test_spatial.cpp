#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "sgf/sgf_model.hpp"
#include "sgf/snn_spatial.hpp"
#include "sgf/stcore.hpp"
#include "support.hpp"

using namespace sgf;
using namespace sgf::spatial;
using support::image_from;

namespace {

SpatialSNNParams params(Region r, int ti, int ta, SpatialArchetype kind = SpatialArchetype::LocationSpecific) {
    return {"X1", r, ti, ta, kind};
}

bool oracle_bit(const CountGrid& counts, const SpatialSNNParams& p) {
    return oracle::gate(image_from(counts), static_cast<int>(p.region.x), static_cast<int>(p.region.y),
                        static_cast<int>(p.region.width), static_cast<int>(p.region.height), p.theta_i,
                        p.theta_a);
}

CountGrid weak_counts(events::Trajectory kind, double cx, double cy, std::uint64_t seed) {
    events::SyntheticGestureSpec spec;
    spec.trajectory = kind;
    spec.center_x = cx;
    spec.center_y = cy;
    const auto frames = events::bin_frames(events::gen_synthetic(spec, seed));
    const auto st = stcore::st_filter(frames, {1, 1, 2, 2});
    return accumulate(st);
}

}  // namespace

TEST_CASE("accumulate: identity, linearity and the per-pixel sum oracle") {
    oracle::Rng rng(8);
    BinaryGrid one({6, 6}, 0);
    for (auto& c : one.cells()) {
        c = rng.chance(0.5) ? 1 : 0;
    }
    const std::vector<BinaryGrid> single{one};
    CHECK(image_from(accumulate(single)).v == image_from(one).v);

    const std::vector<BinaryGrid> same(7, one);
    const auto seven = accumulate(same);
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(seven[i] == 7 * one[i]);
    }

    for (int trial = 0; trial < 50; ++trial) {
        std::vector<BinaryGrid> stack(5, BinaryGrid({6, 6}, 0));
        for (auto& g : stack) {
            for (auto& c : g.cells()) {
                c = rng.chance(0.4) ? 1 : 0;
            }
        }
        const auto got = accumulate(stack);
        for (std::uint32_t y = 0; y < 6; ++y) {
            for (std::uint32_t x = 0; x < 6; ++x) {
                int sum = 0;
                for (const auto& g : stack) {
                    sum += g.at(x, y);
                }
                CHECK(got.at(x, y) == sum);
            }
        }
    }
    CHECK_THROWS_AS(accumulate(std::vector<BinaryGrid>{}), DataError);
    CHECK_THROWS_AS(accumulate(std::vector<BinaryGrid>{BinaryGrid({2, 2}), BinaryGrid({3, 2})}), DataError);
}

TEST_CASE("spatial_response: zero accumulation is silent") {
    CHECK_FALSE(spatial_response(CountGrid({8, 8}, 0), params({0, 0, 8, 8}, 1, 1)));
}

TEST_CASE("spatial_response matches the gate oracle on random grids") {
    oracle::Rng rng(99);
    for (int trial = 0; trial < 500; ++trial) {
        const Geometry g{static_cast<std::uint32_t>(rng.range(1, 10)), static_cast<std::uint32_t>(rng.range(1, 10))};
        CountGrid counts(g, 0);
        for (auto& c : counts.cells()) {
            c = rng.range(0, 6);
        }
        const std::uint32_t x = static_cast<std::uint32_t>(rng.range(0, static_cast<int>(g.width) - 1));
        const std::uint32_t y = static_cast<std::uint32_t>(rng.range(0, static_cast<int>(g.height) - 1));
        const Region r{x, y, static_cast<std::uint32_t>(rng.range(1, static_cast<int>(g.width - x))),
                       static_cast<std::uint32_t>(rng.range(1, static_cast<int>(g.height - y)))};
        const auto p = params(r, rng.range(1, 6), rng.range(1, 10));
        CHECK(spatial_response(counts, p) == oracle_bit(counts, p));
    }
}

TEST_CASE("property: monotone, region-local, theta_a = 1 duality") {
    oracle::Rng rng(5150);
    for (int trial = 0; trial < 300; ++trial) {
        CountGrid counts({8, 8}, 0);
        for (auto& c : counts.cells()) {
            c = rng.range(0, 4);
        }
        const Region r{static_cast<std::uint32_t>(rng.range(0, 3)), static_cast<std::uint32_t>(rng.range(0, 3)), 4, 4};
        const auto p = params(r, rng.range(1, 4), rng.range(1, 8));
        const bool before = spatial_response(counts, p);

        CountGrid more = counts;
        more[static_cast<std::size_t>(rng.range(0, 63))] += rng.range(1, 3);
        CHECK(static_cast<int>(spatial_response(more, p)) >= static_cast<int>(before));

        CountGrid outside = counts;
        for (std::uint32_t y = 0; y < 8; ++y) {
            for (std::uint32_t x = 0; x < 8; ++x) {
                if (!r.contains(x, y)) {
                    outside.at(x, y) = rng.range(0, 9);
                }
            }
        }
        CHECK(spatial_response(outside, p) == before);

        const auto one = params(r, p.theta_i, 1);
        bool any = false;
        for (std::uint32_t y = r.y; y < r.y + r.height; ++y) {
            for (std::uint32_t x = r.x; x < r.x + r.width; ++x) {
                any = any || counts.at(x, y) >= p.theta_i;
            }
        }
        CHECK(spatial_response(counts, one) == any);
    }
}

TEST_CASE("small-area oscillation: intensive detector fires, plateau detector silent") {
    const auto counts = weak_counts(events::Trajectory::OscillateSmallArea, 16, 20, 3);
    const Region area{4, 8, 24, 24};
    const auto a = params(area, 30, 8, SpatialArchetype::ConstrainedIntensive);
    const auto b = params(area, 3, 150, SpatialArchetype::PlateauMild);
    CHECK(oracle_bit(counts, a));
    CHECK_FALSE(oracle_bit(counts, b));
    CHECK(spatial_response(counts, a));
    CHECK_FALSE(spatial_response(counts, b));
}

TEST_CASE("circular sweep: plateau detector fires, intensive detector silent") {
    const auto counts = weak_counts(events::Trajectory::CircularCw, 16, 32, 3);
    const Region area{0, 16, 32, 32};
    const auto a = params(area, 30, 8, SpatialArchetype::ConstrainedIntensive);
    const auto b = params(area, 3, 150, SpatialArchetype::PlateauMild);
    CHECK(oracle_bit(counts, b));
    CHECK_FALSE(oracle_bit(counts, a));
    CHECK(spatial_response(counts, b));
    CHECK_FALSE(spatial_response(counts, a));
}

TEST_CASE("default banks: 16 A/D, 18 B/C and 2 G detectors inside the grid") {
    const auto net = default_network();
    std::size_t ad = 0, bc = 0, g = 0;
    for (const auto& p : net.unit_a.spatial) {
        CHECK_NOTHROW(validate(p, net.geometry));
        switch (p.archetype) {
            case SpatialArchetype::ConstrainedIntensive:
                ++ad;
                CHECK(p.theta_i > p.theta_a);
                break;
            case SpatialArchetype::PlateauMild:
                ++bc;
                CHECK(p.theta_i < p.theta_a);
                break;
            case SpatialArchetype::LocationSpecific:
                ++g;
                break;
        }
    }
    CHECK(ad == 16);
    CHECK(bc == 18);
    CHECK(g == 2);
    CHECK(net.unit_a.slot_count() == 36);
}

TEST_CASE("validate names the detector") {
    const Geometry g{16, 16};
    auto bad = params({10, 10, 8, 8}, 2, 1);
    bad.feature_id = "A7";
    try {
        validate(bad, g);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("A7") != std::string::npos);
    }
    CHECK_THROWS_AS(validate(params({0, 0, 4, 4}, 1, 2, SpatialArchetype::ConstrainedIntensive), g), ConfigError);
    CHECK_THROWS_AS(validate(params({0, 0, 4, 4}, 2, 1, SpatialArchetype::PlateauMild), g), ConfigError);
    CHECK_THROWS_AS(validate(params({0, 0, 4, 4}, 0, 1), g), ConfigError);
}

TEST_CASE("half-tiled bank covers both halves with stable ids") {
    BankLayout l;
    l.prefix = "A";
    l.right_prefix = "D";
    l.cols = 2;
    l.rows = 4;
    l.tile_width = 20;
    l.tile_height = 20;
    const auto bank = make_half_tiled_bank(l, {64, 64});
    REQUIRE(bank.size() == 16);
    CHECK(bank.front().feature_id == "A1");
    CHECK(bank[8].feature_id == "D1");
    CHECK(bank.front().region == Region{0, 0, 20, 20});
    CHECK(bank[7].region == Region{12, 44, 20, 20});
    CHECK(bank[15].region == Region{44, 44, 20, 20});
}
