#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sgf {

/// Fixed-length bit string over a unit's feature slots. Bit k is slot k.
class FeatureVector {
public:
    FeatureVector() = default;
    explicit FeatureVector(std::size_t length) : length_(length), words_((length + 63) / 64, 0) {}

    /// "0101..." with slot 0 first. Throws DataError on other characters.
    static FeatureVector from_string(std::string_view bits);

    std::size_t size() const { return length_; }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
    void set(std::size_t i, bool value = true) {
        const std::uint64_t mask = std::uint64_t{1} << (i % 64);
        if (value) {
            words_[i / 64] |= mask;
        } else {
            words_[i / 64] &= ~mask;
        }
    }
    std::size_t count() const;
    std::string to_string() const;

    const std::vector<std::uint64_t>& words() const { return words_; }

    /// popcount(NOR(a, b)): slots where both bits are zero.
    friend std::size_t nor_count(const FeatureVector& a, const FeatureVector& b);
    /// popcount(XNOR(a, b)): slots where the bits agree.
    friend std::size_t xnor_count(const FeatureVector& a, const FeatureVector& b);

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
    friend auto operator<=>(const FeatureVector& a, const FeatureVector& b) {
        if (auto c = a.length_ <=> b.length_; c != 0) {
            return c;
        }
        return a.words_ <=> b.words_;
    }

private:
    std::uint64_t tail_mask(std::size_t word) const;

    std::size_t length_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace sgf

template <>
struct std::hash<sgf::FeatureVector> {
    std::size_t operator()(const sgf::FeatureVector& v) const noexcept {
        std::size_t h = std::hash<std::size_t>{}(v.size());
        for (auto w : v.words()) {
            h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};
