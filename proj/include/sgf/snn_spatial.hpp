#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgf/common.hpp"

namespace sgf::spatial {

enum class SpatialArchetype {
    ConstrainedIntensive,  // A/D: theta_i > theta_a
    PlateauMild,           // B/C: theta_i < theta_a
    LocationSpecific,      // G
};

std::string_view to_string(SpatialArchetype a);

struct SpatialSNNParams {
    std::string feature_id;
    Region region;
    int theta_i = 1;  // accumulated count a pixel needs to pass the intensity gate
    int theta_a = 1;  // gated pixels the region needs to pass the area gate
    SpatialArchetype archetype = SpatialArchetype::LocationSpecific;
};

/// Throws ConfigError if the region leaves the geometry, a threshold is
/// below 1, or the thresholds contradict the archetype's regime.
void validate(const SpatialSNNParams& params, const Geometry& geometry);

/// Per-pixel count of spikes over all frames. Throws DataError on empty
/// input or mixed geometries.
CountGrid accumulate(std::span<const BinaryGrid> st_outputs);

/// Number of region pixels whose accumulated count reaches theta_i.
std::int64_t gated_area(const CountGrid& counts, const SpatialSNNParams& params);

/// Single feature bit: area gate over the intensity-gated region.
bool spatial_response(const CountGrid& counts, const SpatialSNNParams& params);

/// Layout of one tiled bank. Tiles are placed on a cols x rows lattice inside
/// each half of the frame (left half first), evenly spread so the first and
/// last tile touch the half's borders.
struct BankLayout {
    std::string prefix;       // ids are prefix + 1-based index, e.g. "A3"
    std::string right_prefix; // ids used for right-half tiles, e.g. "D"
    std::uint32_t cols = 1;   // per half
    std::uint32_t rows = 1;
    std::uint32_t tile_width = 1;
    std::uint32_t tile_height = 1;
    int theta_i = 1;
    int theta_a = 1;
    SpatialArchetype archetype = SpatialArchetype::ConstrainedIntensive;
};

std::vector<SpatialSNNParams> make_half_tiled_bank(const BankLayout& layout, const Geometry& geometry);

}  // namespace sgf::spatial
