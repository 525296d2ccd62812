#include "sgf/snn_spatial.hpp"

namespace sgf::spatial {

std::string_view to_string(SpatialArchetype a) {
    switch (a) {
        case SpatialArchetype::ConstrainedIntensive:
            return "constrained-intensive";
        case SpatialArchetype::PlateauMild:
            return "plateau-mild";
        case SpatialArchetype::LocationSpecific:
            return "location-specific";
    }
    return "unknown";
}

void validate(const SpatialSNNParams& params, const Geometry& geometry) {
    const std::string& id = params.feature_id;
    if (!params.region.within(geometry)) {
        throw ConfigError(id + ".region: outside the " + std::to_string(geometry.width) + "x" +
                          std::to_string(geometry.height) + " grid");
    }
    if (params.theta_i < 1) {
        throw ConfigError(id + ".theta_i: must be >= 1");
    }
    if (params.theta_a < 1) {
        throw ConfigError(id + ".theta_a: must be >= 1");
    }
    if (params.archetype == SpatialArchetype::ConstrainedIntensive &&
        !(params.theta_i > params.theta_a)) {
        throw ConfigError(id + ": constrained-intensive detectors need theta_i > theta_a");
    }
    if (params.archetype == SpatialArchetype::PlateauMild && !(params.theta_i < params.theta_a)) {
        throw ConfigError(id + ": plateau-mild detectors need theta_i < theta_a");
    }
}

CountGrid accumulate(std::span<const BinaryGrid> st_outputs) {
    if (st_outputs.empty()) {
        throw DataError("accumulate: no frames");
    }
    const Geometry g = st_outputs.front().geometry();
    CountGrid counts(g);
    for (std::size_t t = 0; t < st_outputs.size(); ++t) {
        const auto& grid = st_outputs[t];
        if (grid.geometry() != g) {
            throw DataError("accumulate: frame " + std::to_string(t) + " geometry mismatch");
        }
        for (std::size_t i = 0; i < counts.size(); ++i) {
            counts[i] += grid[i];
        }
    }
    return counts;
}

std::int64_t gated_area(const CountGrid& counts, const SpatialSNNParams& params) {
    const Region& r = params.region;
    std::int64_t fired = 0;
    for (std::uint32_t y = r.y; y < r.y + r.height; ++y) {
        for (std::uint32_t x = r.x; x < r.x + r.width; ++x) {
            if (counts.at(x, y) >= params.theta_i) {
                ++fired;
            }
        }
    }
    return fired;
}

bool spatial_response(const CountGrid& counts, const SpatialSNNParams& params) {
    return gated_area(counts, params) >= params.theta_a;
}

std::vector<SpatialSNNParams> make_half_tiled_bank(const BankLayout& layout, const Geometry& geometry) {
    const std::uint32_t half = geometry.width / 2;
    if (layout.cols == 0 || layout.rows == 0 || layout.tile_width == 0 || layout.tile_height == 0) {
        throw ConfigError(layout.prefix + ": tile lattice must be non-empty");
    }
    if (layout.tile_width > half || layout.tile_height > geometry.height) {
        throw ConfigError(layout.prefix + ": tile larger than a half frame");
    }
    auto offsets = [](std::uint32_t count, std::uint32_t span, std::uint32_t tile) {
        std::vector<std::uint32_t> out;
        const std::uint32_t room = span - tile;
        for (std::uint32_t i = 0; i < count; ++i) {
            out.push_back(count == 1 ? room / 2 : room * i / (count - 1));
        }
        return out;
    };
    const auto xs = offsets(layout.cols, half, layout.tile_width);
    const auto ys = offsets(layout.rows, geometry.height, layout.tile_height);

    std::vector<SpatialSNNParams> bank;
    for (int side = 0; side < 2; ++side) {
        const std::string& prefix = side == 0 ? layout.prefix : layout.right_prefix;
        const std::uint32_t base = side == 0 ? 0 : geometry.width - half;
        int index = 0;
        for (auto y : ys) {
            for (auto x : xs) {
                SpatialSNNParams p;
                p.feature_id = prefix + std::to_string(++index);
                p.region = {base + x, y, layout.tile_width, layout.tile_height};
                p.theta_i = layout.theta_i;
                p.theta_a = layout.theta_a;
                p.archetype = layout.archetype;
                bank.push_back(std::move(p));
            }
        }
    }
    return bank;
}

}  // namespace sgf::spatial
