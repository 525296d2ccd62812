#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (event files, model files, manifests).
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value; the message names the offending key.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct Geometry {
    std::uint32_t width = 0;
    std::uint32_t height = 0;

    std::size_t pixels() const { return std::size_t{width} * height; }
    bool empty() const { return width == 0 || height == 0; }
    bool contains(std::int64_t x, std::int64_t y) const {
        return x >= 0 && y >= 0 && x < width && y < height;
    }
    friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// Axis-aligned rectangle in pixel coordinates.
struct Region {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t width = 0;
    std::uint32_t height = 0;

    bool within(const Geometry& g) const {
        return width > 0 && height > 0 && std::uint64_t{x} + width <= g.width &&
               std::uint64_t{y} + height <= g.height;
    }
    bool contains(std::uint32_t px, std::uint32_t py) const {
        return px >= x && py >= y && px < x + width && py < y + height;
    }
    static Region full(const Geometry& g) { return {0, 0, g.width, g.height}; }
    friend bool operator==(const Region&, const Region&) = default;
};

/// Dense row-major 2-D array over a Geometry.
template <typename T>
class Grid {
public:
    Grid() = default;
    explicit Grid(Geometry g, T fill = T{}) : geometry_(g), cells_(g.pixels(), fill) {}

    const Geometry& geometry() const { return geometry_; }
    std::uint32_t width() const { return geometry_.width; }
    std::uint32_t height() const { return geometry_.height; }
    std::size_t size() const { return cells_.size(); }

    T& at(std::uint32_t x, std::uint32_t y) { return cells_[std::size_t{y} * geometry_.width + x]; }
    const T& at(std::uint32_t x, std::uint32_t y) const {
        return cells_[std::size_t{y} * geometry_.width + x];
    }
    T& operator[](std::size_t i) { return cells_[i]; }
    const T& operator[](std::size_t i) const { return cells_[i]; }

    const std::vector<T>& cells() const { return cells_; }
    std::vector<T>& cells() { return cells_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Geometry geometry_{};
    std::vector<T> cells_;
};

using CountGrid = Grid<std::int32_t>;
/// Spike map: every cell is 0 or 1.
using BinaryGrid = Grid<std::uint8_t>;

}  // namespace sgf
