#pragma once

// Brute-force reference implementations. They share no code with the
// library: plain nested loops over plain vectors, written straight from the
// definitions.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

/// Row-major int image.
struct Image {
    int w = 0;
    int h = 0;
    std::vector<int> v;

    Image() = default;
    Image(int w_, int h_) : w(w_), h(h_), v(static_cast<std::size_t>(w_ * h_), 0) {}
    int& at(int x, int y) { return v[static_cast<std::size_t>(y * w + x)]; }
    int at(int x, int y) const { return v[static_cast<std::size_t>(y * w + x)]; }
};

/// Spatiotemporal filter evaluated directly per output pixel: for each frame
/// in the window (t-dt, t] count how often the anchored (ds+1)x(ds+1) event
/// sum reached theta_s, fire when that count reaches theta_t. Frames before
/// a full window produce nothing.
inline std::vector<Image> st_filter(const std::vector<Image>& magnitude, int ds, int ts, int dt, int tt) {
    std::vector<Image> out;
    for (std::size_t t = 0; t < magnitude.size(); ++t) {
        const int w = magnitude[t].w;
        const int h = magnitude[t].h;
        Image o(w, h);
        if (static_cast<int>(t) + 1 >= dt) {
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    int passed = 0;
                    for (int tau = static_cast<int>(t) - dt + 1; tau <= static_cast<int>(t); ++tau) {
                        int sum = 0;
                        for (int j = y; j <= y + ds; ++j) {
                            for (int i = x; i <= x + ds; ++i) {
                                if (i < w && j < h) {
                                    sum += magnitude[static_cast<std::size_t>(tau)].at(i, j);
                                }
                            }
                        }
                        passed += sum >= ts ? 1 : 0;
                    }
                    o.at(x, y) = passed >= tt ? 1 : 0;
                }
            }
        }
        out.push_back(o);
    }
    return out;
}

/// Area gate over an accumulated count image.
inline bool gate(const Image& counts, int rx, int ry, int rw, int rh, int theta_i, int theta_a) {
    int fired = 0;
    for (int y = 0; y < counts.h; ++y) {
        for (int x = 0; x < counts.w; ++x) {
            const bool inside = x >= rx && x < rx + rw && y >= ry && y < ry + rh;
            if (inside && counts.at(x, y) >= theta_i) {
                ++fired;
            }
        }
    }
    return fired >= theta_a;
}

/// Temporal neuron inputs: pairs (current m, previous i) with the signed
/// axis difference strictly above theta_l.
struct Pt {
    int x;
    int y;
};

inline std::vector<int> temporal_inputs(const std::vector<Pt>& cur, const std::vector<Pt>& prev, bool vertical,
                                        bool increasing, int theta_l) {
    std::vector<int> counts;
    for (const Pt& m : cur) {
        int c = 0;
        for (const Pt& i : prev) {
            int d = vertical ? m.y - i.y : m.x - i.x;
            if (!increasing) {
                d = -d;
            }
            if (d > theta_l) {
                ++c;
            }
        }
        counts.push_back(c);
    }
    return counts;
}

/// Weighted match score on bit strings: NOR counts positions where both are '0', XNOR
/// positions where they agree.
inline double score(const std::string& v, const std::vector<std::string>& stored, const std::vector<double>& w,
                    bool xnor) {
    double s = 0.0;
    for (std::size_t j = 0; j < stored.size(); ++j) {
        int match = 0;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const bool a = stored[j][k] == '1';
            const bool b = v[k] == '1';
            match += xnor ? (a == b) : (!a && !b);
        }
        s += static_cast<double>(match) / static_cast<double>(v.size()) * w[j];
    }
    return s;
}

/// Cyclic walk: every rotation of `ref`, repeated, checked against the
/// collapsed observation from the start, observation at least as long as
/// `ref`.
template <typename T>
bool cyclic_match(std::vector<T> observed, const std::vector<T>& ref) {
    observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
    if (observed.size() < ref.size()) {
        return false;
    }
    for (std::size_t r = 0; r < ref.size(); ++r) {
        bool ok = true;
        for (std::size_t k = 0; k < observed.size() && ok; ++k) {
            ok = observed[k] == ref[(r + k) % ref.size()];
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

/// AER word assembled bit by bit.
inline std::uint32_t aer_word(unsigned col, unsigned row, unsigned pol) {
    std::uint32_t w = 0;
    for (unsigned b = 0; b < 7; ++b) {
        if ((col >> b) & 1U) {
            w |= 1U << (8 + b);
        }
        if ((row >> b) & 1U) {
            w |= 1U << (1 + b);
        }
    }
    if (pol) {
        w |= 1U;
    }
    return w;
}

/// Small deterministic generator for property tests (splitmix64).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    int range(int lo, int hi) {  // inclusive
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }

private:
    std::uint64_t s_;
};

}  // namespace oracle
