#pragma once

// Helpers shared by the test programs: conversion between library grids and
// oracle images, and a small trained model on the synthetic suite.

#include <vector>

#include "oracles.hpp"
#include "sgf/events.hpp"
#include "sgf/sgf_model.hpp"
#include "sgf/synthetic.hpp"

namespace support {

inline sgf::events::Frame frame_from(const oracle::Image& magnitude, std::size_t index = 0) {
    const sgf::Geometry g{static_cast<std::uint32_t>(magnitude.w), static_cast<std::uint32_t>(magnitude.h)};
    sgf::events::Frame f{index, sgf::CountGrid(g, 0), sgf::CountGrid(g, 0)};
    for (std::size_t i = 0; i < magnitude.v.size(); ++i) {
        f.grid[i] = magnitude.v[i];
        f.magnitude[i] = magnitude.v[i];
    }
    return f;
}

template <typename T>
oracle::Image image_from(const sgf::Grid<T>& grid) {
    oracle::Image img(static_cast<int>(grid.width()), static_cast<int>(grid.height()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        img.v[i] = static_cast<int>(grid[i]);
    }
    return img;
}

inline oracle::Image random_image(oracle::Rng& rng, int w, int h, double density, int max_count) {
    oracle::Image img(w, h);
    for (auto& c : img.v) {
        c = rng.chance(density) ? rng.range(1, max_count) : 0;
    }
    return img;
}

/// Labelled suite samples: `per_class` per class, seeds offset by `base`.
inline std::vector<sgf::events::EventStream> suite(int per_class, std::uint64_t base,
                                                   const sgf::events::SuiteSettings& settings = {}) {
    std::vector<sgf::events::EventStream> out;
    for (int i = 0; i < per_class; ++i) {
        for (int c = 1; c <= sgf::events::kClassCount; ++c) {
            auto s = sgf::events::suite_sample(c, sgf::events::CounterRng::mix(base, static_cast<std::uint64_t>(c),
                                                                                static_cast<std::uint64_t>(i)),
                                               settings);
            s.label = c;
            out.push_back(std::move(s));
        }
    }
    return out;
}

inline sgf::SgfModel trained_model(const std::vector<sgf::events::EventStream>& train) {
    sgf::SgfModel model(sgf::default_network());
    sgf::online_learn(train, model);
    return model;
}

}  // namespace support
