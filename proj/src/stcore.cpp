#include "sgf/stcore.hpp"

#include <algorithm>

namespace sgf::stcore {

void validate(const STCoreParams& params) {
    if (params.delta_s < 0) {
        throw ConfigError("delta_s: must be >= 0");
    }
    if (params.theta_s < 1) {
        throw ConfigError("theta_s: must be >= 1");
    }
    if (params.delta_t < 1) {
        throw ConfigError("delta_t: must be >= 1");
    }
    if (params.theta_t < 1) {
        throw ConfigError("theta_t: must be >= 1");
    }
}

std::vector<std::string> warnings(const STCoreParams& params) {
    std::vector<std::string> out;
    if (params.theta_t > params.delta_t) {
        out.push_back("theta_t exceeds delta_t: the core never fires");
    }
    return out;
}

BinaryGrid spatial_stage(const events::Frame& frame, int delta_s, int theta_s, bool signed_sum) {
    const CountGrid& source = signed_sum ? frame.grid : frame.magnitude;
    const Geometry g = source.geometry();
    BinaryGrid out(g);
    if (g.empty()) {
        return out;
    }

    // Summed-area table with a zero guard row and column.
    const std::size_t stride = std::size_t{g.width} + 1;
    std::vector<std::int64_t> sat(stride * (std::size_t{g.height} + 1), 0);
    for (std::uint32_t y = 0; y < g.height; ++y) {
        std::int64_t row = 0;
        for (std::uint32_t x = 0; x < g.width; ++x) {
            row += source.at(x, y);
            sat[(y + 1) * stride + (x + 1)] = sat[y * stride + (x + 1)] + row;
        }
    }

    const std::int64_t d = std::max(delta_s, 0);
    for (std::uint32_t y = 0; y < g.height; ++y) {
        const std::size_t y1 = std::min<std::int64_t>(y + d + 1, g.height);
        for (std::uint32_t x = 0; x < g.width; ++x) {
            const std::size_t x1 = std::min<std::int64_t>(x + d + 1, g.width);
            const std::int64_t sum = sat[y1 * stride + x1] - sat[y * stride + x1] -
                                     sat[y1 * stride + x] + sat[y * stride + x];
            out.at(x, y) = sum >= theta_s ? 1 : 0;
        }
    }
    return out;
}

BinaryGrid temporal_stage(std::span<const BinaryGrid> window, int delta_t, int theta_t) {
    if (window.empty()) {
        return {};
    }
    BinaryGrid out(window.back().geometry());
    if (delta_t < 1 || window.size() < static_cast<std::size_t>(delta_t)) {
        return out;
    }
    const auto recent = window.subspan(window.size() - static_cast<std::size_t>(delta_t));
    std::vector<int> sums(out.size(), 0);
    for (const auto& grid : recent) {
        for (std::size_t i = 0; i < sums.size(); ++i) {
            sums[i] += grid[i];
        }
    }
    for (std::size_t i = 0; i < sums.size(); ++i) {
        out[i] = sums[i] >= theta_t ? 1 : 0;
    }
    return out;
}

std::vector<BinaryGrid> st_filter(std::span<const events::Frame> frames, const STCoreParams& params) {
    validate(params);
    std::vector<BinaryGrid> spatial;
    spatial.reserve(frames.size());
    for (const auto& frame : frames) {
        spatial.push_back(spatial_stage(frame, params.delta_s, params.theta_s, params.signed_sum));
    }

    std::vector<BinaryGrid> out;
    out.reserve(frames.size());
    if (frames.empty()) {
        return out;
    }
    const Geometry g = spatial.front().geometry();
    const auto delta_t = static_cast<std::size_t>(params.delta_t);
    // Running per-pixel sum over the sliding window.
    std::vector<int> sums(g.pixels(), 0);
    for (std::size_t t = 0; t < spatial.size(); ++t) {
        if (spatial[t].geometry() != g) {
            throw DataError("st_filter: frame " + std::to_string(t) + " geometry mismatch");
        }
        for (std::size_t i = 0; i < sums.size(); ++i) {
            sums[i] += spatial[t][i];
        }
        if (t >= delta_t) {
            const auto& leaving = spatial[t - delta_t];
            for (std::size_t i = 0; i < sums.size(); ++i) {
                sums[i] -= leaving[i];
            }
        }
        BinaryGrid grid(g);
        if (t + 1 >= delta_t) {
            for (std::size_t i = 0; i < sums.size(); ++i) {
                grid[i] = sums[i] >= params.theta_t ? 1 : 0;
            }
        }
        out.push_back(std::move(grid));
    }
    return out;
}

}  // namespace sgf::stcore
