#include "sgf/snn_temporal.hpp"

#include <algorithm>
#include <cstdlib>

namespace sgf::temporal {

std::string_view to_string(Token t) {
    switch (t) {
        case Token::TD:
            return "TD";
        case Token::BU:
            return "BU";
        case Token::LR:
            return "LR";
        case Token::RL:
            return "RL";
    }
    return "?";
}

std::optional<Token> parse_token(std::string_view s) {
    for (Token t : {Token::TD, Token::BU, Token::LR, Token::RL}) {
        if (to_string(t) == s) {
            return t;
        }
    }
    return std::nullopt;
}

std::string to_string(const TemporalPattern& p) {
    std::string out = "[";
    for (std::size_t i = 0; i < p.tokens.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += to_string(p.tokens[i]);
    }
    return out + "]";
}

TemporalPattern parse_pattern(std::string_view text) {
    TemporalPattern p;
    std::string token;
    auto flush = [&] {
        if (token.empty()) {
            return;
        }
        auto t = parse_token(token);
        if (!t) {
            throw ConfigError("unknown movement token \"" + token + "\"");
        }
        p.tokens.push_back(*t);
        token.clear();
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '[' || c == ']' || c == '\t') {
            flush();
        } else {
            token += c;
        }
    }
    flush();
    return p;
}

TemporalPattern clockwise_pattern() { return {{Token::TD, Token::RL, Token::BU, Token::LR}, {}}; }

TemporalPattern counter_clockwise_pattern() {
    return {{Token::TD, Token::LR, Token::BU, Token::RL}, {}};
}

void validate(const TemporalSNNParams& params, const Geometry& geometry) {
    const std::string& id = params.feature_id;
    if (params.delta_t < 1) {
        throw ConfigError(id + ".delta_t: must be >= 1");
    }
    if (params.theta_te < 1) {
        throw ConfigError(id + ".theta_te: must be >= 1");
    }
    if (params.theta_l < 0) {
        throw ConfigError(id + ".theta_l: must be >= 0");
    }
    if (params.min_run < 1) {
        throw ConfigError(id + ".min_run: must be >= 1");
    }
    if (params.reference.empty()) {
        throw ConfigError(id + ".reference: must name at least one token");
    }
    const Region& r = params.region;
    if (!(r.width == 0 && r.height == 0) && !r.within(geometry)) {
        throw ConfigError(id + ".region: outside the grid");
    }
}

std::vector<Point> active_neurons(const BinaryGrid& grid, const Region& region) {
    Region r = region;
    if (r.width == 0 && r.height == 0) {
        r = Region::full(grid.geometry());
    }
    std::vector<Point> out;
    for (std::uint32_t y = r.y; y < r.y + r.height; ++y) {
        for (std::uint32_t x = r.x; x < r.x + r.width; ++x) {
            if (grid.at(x, y)) {
                out.push_back({x, y});
            }
        }
    }
    return out;
}

namespace {

int coordinate(const Point& p, Axis axis) {
    return static_cast<int>(axis == Axis::Vertical ? p.y : p.x);
}

}  // namespace

std::vector<int> temporal_neuron_inputs(std::span<const Point> current,
                                        std::span<const Point> previous, Axis axis,
                                        Direction direction, int theta_l) {
    std::vector<int> prev;
    prev.reserve(previous.size());
    for (const auto& p : previous) {
        prev.push_back(coordinate(p, axis));
    }
    std::sort(prev.begin(), prev.end());

    std::vector<int> counts;
    counts.reserve(current.size());
    for (const auto& m : current) {
        const int l = coordinate(m, axis);
        std::ptrdiff_t n = 0;
        if (direction == Direction::Increasing) {
            // l - l_i > theta_l  <=>  l_i < l - theta_l
            n = std::lower_bound(prev.begin(), prev.end(), l - theta_l) - prev.begin();
        } else {
            // l_i - l > theta_l  <=>  l_i > l + theta_l
            n = prev.end() - std::upper_bound(prev.begin(), prev.end(), l + theta_l);
        }
        counts.push_back(static_cast<int>(n));
    }
    return counts;
}

std::vector<std::size_t> temporal_spikes(std::span<const int> counts, int theta_te) {
    std::vector<std::size_t> fired;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] >= theta_te) {
            fired.push_back(i);
        }
    }
    return fired;
}

LocationTrace location_trace(std::span<const BinaryGrid> st_outputs, const TemporalSNNParams& params) {
    LocationTrace trace(st_outputs.size());
    const auto lag = static_cast<std::size_t>(std::max(params.delta_t, 1));
    std::vector<std::vector<Point>> active;
    active.reserve(st_outputs.size());
    for (const auto& grid : st_outputs) {
        active.push_back(active_neurons(grid, params.region));
    }
    for (std::size_t t = lag; t < st_outputs.size(); ++t) {
        const auto& cur = active[t];
        const auto counts =
            temporal_neuron_inputs(cur, active[t - lag], params.axis, params.direction, params.theta_l);
        std::optional<int> location;
        for (std::size_t i : temporal_spikes(counts, params.theta_te)) {
            const int l = coordinate(cur[i], params.axis);
            if (!location || l > *location) {
                location = l;
            }
        }
        trace[t] = location;
    }
    return trace;
}

TemporalPattern tokenize(const LocationTrace& vertical, const LocationTrace& horizontal, int min_run) {
    const std::size_t n = std::min(vertical.size(), horizontal.size());
    std::vector<Token> labels;
    for (std::size_t t = 1; t < n; ++t) {
        int dv = 0;
        int dh = 0;
        if (vertical[t] && vertical[t - 1]) {
            dv = *vertical[t] - *vertical[t - 1];
        }
        if (horizontal[t] && horizontal[t - 1]) {
            dh = *horizontal[t] - *horizontal[t - 1];
        }
        if (std::abs(dv) == std::abs(dh)) {
            continue;  // no movement or a diagonal step: no label
        }
        if (std::abs(dv) > std::abs(dh)) {
            labels.push_back(dv > 0 ? Token::TD : Token::BU);
        } else {
            labels.push_back(dh > 0 ? Token::LR : Token::RL);
        }
    }

    TemporalPattern pattern;
    std::size_t i = 0;
    while (i < labels.size()) {
        std::size_t j = i;
        while (j < labels.size() && labels[j] == labels[i]) {
            ++j;
        }
        const std::size_t run = j - i;
        if (run >= static_cast<std::size_t>(std::max(min_run, 1))) {
            if (!pattern.tokens.empty() && pattern.tokens.back() == labels[i]) {
                pattern.run_lengths.back() += run;
            } else {
                pattern.tokens.push_back(labels[i]);
                pattern.run_lengths.push_back(run);
            }
        }
        i = j;
    }
    return pattern;
}

std::optional<Token> dominant_token(const TemporalPattern& observed) {
    if (observed.tokens.empty()) {
        return std::nullopt;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < observed.tokens.size(); ++i) {
        const std::size_t len = i < observed.run_lengths.size() ? observed.run_lengths[i] : 1;
        const std::size_t best_len =
            best < observed.run_lengths.size() ? observed.run_lengths[best] : 1;
        if (len > best_len) {
            best = i;
        }
    }
    return observed.tokens[best];
}

bool match_pattern(const TemporalPattern& observed, const TemporalPattern& reference) {
    if (reference.tokens.empty() || observed.tokens.empty()) {
        return false;
    }
    if (reference.tokens.size() == 1) {
        return dominant_token(observed) == reference.tokens.front();
    }

    std::vector<Token> seq;
    for (Token t : observed.tokens) {
        if (seq.empty() || seq.back() != t) {
            seq.push_back(t);
        }
    }

    // The observed tokens must walk the reference cycle in order, starting
    // anywhere, and cover at least one full cycle.
    const auto& ref = reference.tokens;
    const std::size_t n = ref.size();
    if (seq.size() < n) {
        return false;
    }
    for (std::size_t rot = 0; rot < n; ++rot) {
        bool ok = true;
        for (std::size_t i = 0; i < seq.size() && ok; ++i) {
            ok = seq[i] == ref[(i + rot) % n];
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

TemporalEvaluation evaluate(std::span<const BinaryGrid> st_outputs, const TemporalSNNParams& params) {
    TemporalEvaluation eval;
    TemporalSNNParams p = params;
    p.axis = Axis::Vertical;
    eval.vertical = location_trace(st_outputs, p);
    p.axis = Axis::Horizontal;
    eval.horizontal = location_trace(st_outputs, p);
    eval.observed = tokenize(eval.vertical, eval.horizontal, params.min_run);
    eval.fired = match_pattern(eval.observed, params.reference);
    return eval;
}

bool temporal_response(std::span<const BinaryGrid> st_outputs, const TemporalSNNParams& params) {
    return evaluate(st_outputs, params).fired;
}

}  // namespace sgf::temporal
