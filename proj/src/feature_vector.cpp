#include "sgf/feature_vector.hpp"

#include "sgf/common.hpp"

namespace sgf {

FeatureVector FeatureVector::from_string(std::string_view bits) {
    FeatureVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            v.set(i);
        } else if (bits[i] != '0') {
            throw DataError("feature vector: unexpected character '" + std::string(1, bits[i]) + "'");
        }
    }
    return v;
}

std::size_t FeatureVector::count() const {
    std::size_t n = 0;
    for (auto w : words_) {
        n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
}

std::string FeatureVector::to_string() const {
    std::string out(length_, '0');
    for (std::size_t i = 0; i < length_; ++i) {
        if (test(i)) {
            out[i] = '1';
        }
    }
    return out;
}

std::uint64_t FeatureVector::tail_mask(std::size_t word) const {
    const std::size_t used = length_ - word * 64;
    return used >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << used) - 1;
}

std::size_t nor_count(const FeatureVector& a, const FeatureVector& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
        n += static_cast<std::size_t>(std::popcount(~(a.words_[i] | b.words_[i]) & a.tail_mask(i)));
    }
    return n;
}

std::size_t xnor_count(const FeatureVector& a, const FeatureVector& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
        n += static_cast<std::size_t>(std::popcount(~(a.words_[i] ^ b.words_[i]) & a.tail_mask(i)));
    }
    return n;
}

}  // namespace sgf
