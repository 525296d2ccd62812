#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgf/common.hpp"

namespace sgf::temporal {

enum class Axis { Vertical, Horizontal };

/// Sign of the location comparison. Increasing: a neuron takes input from
/// earlier neurons with a smaller index on the axis (row for vertical, so
/// vertical/increasing is top-down).
enum class Direction { Increasing, Decreasing };

/// Movement tokens: top-down, bottom-up, left-right, right-left.
enum class Token { TD, BU, LR, RL };

std::string_view to_string(Token t);
std::optional<Token> parse_token(std::string_view s);

struct TemporalPattern {
    std::vector<Token> tokens;
    /// Labelled frames behind each token when produced by tokenize();
    /// empty for reference patterns.
    std::vector<std::size_t> run_lengths;

    bool empty() const { return tokens.empty(); }
    friend bool operator==(const TemporalPattern& a, const TemporalPattern& b) {
        return a.tokens == b.tokens;
    }
};

std::string to_string(const TemporalPattern& p);
/// Parses "TD,LR,BU,RL" (also accepts "[TD, LR]").
TemporalPattern parse_pattern(std::string_view text);

/// Reference sequences.
TemporalPattern clockwise_pattern();         // [TD, RL, BU, LR]
TemporalPattern counter_clockwise_pattern(); // [TD, LR, BU, RL]

struct TemporalSNNParams {
    std::string feature_id;
    Axis axis = Axis::Vertical;
    Direction direction = Direction::Increasing;
    int delta_t = 1;   // comparison frame window
    int theta_l = 0;   // location difference must exceed this
    int theta_te = 1;  // input count a neuron needs to spike
    Region region;     // empty region means the whole frame
    TemporalPattern reference;
    int min_run = 3;
};

/// Throws ConfigError naming the feature id on invalid parameters.
void validate(const TemporalSNNParams& params, const Geometry& geometry);

struct Point {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Active (spiking) pixels of a grid inside `region`, in row-major order.
std::vector<Point> active_neurons(const BinaryGrid& grid, const Region& region);

/// Input count of every current neuron: the number of previous neurons whose
/// location difference along `axis` (sign per `direction`) exceeds theta_l.
std::vector<int> temporal_neuron_inputs(std::span<const Point> current,
                                        std::span<const Point> previous, Axis axis,
                                        Direction direction, int theta_l);

/// Indices of neurons whose count reaches theta_te.
std::vector<std::size_t> temporal_spikes(std::span<const int> counts, int theta_te);

/// Per-frame object location: the largest axis index among fired neurons.
using LocationTrace = std::vector<std::optional<int>>;

/// Frames before delta_t have no comparison reference and stay absent.
LocationTrace location_trace(std::span<const BinaryGrid> st_outputs, const TemporalSNNParams& params);

/// Labels every frame by the dominant location delta against the previous
/// frame (|drow| >= |dcol| is vertical), drops runs shorter than min_run and
/// collapses repeated tokens.
TemporalPattern tokenize(const LocationTrace& vertical, const LocationTrace& horizontal, int min_run);

/// Multi-token references match when the observed tokens follow the
/// reference cycle in order from any starting phase and cover at least one
/// full cycle. Single-token references match the observed dominant token.
bool match_pattern(const TemporalPattern& observed, const TemporalPattern& reference);

/// Token with the longest run (first one on ties).
std::optional<Token> dominant_token(const TemporalPattern& observed);

/// Full detector: vertical and horizontal traces with the detector's sign,
/// tokenized and matched against its reference.
struct TemporalEvaluation {
    LocationTrace vertical;
    LocationTrace horizontal;
    TemporalPattern observed;
    bool fired = false;
};

TemporalEvaluation evaluate(std::span<const BinaryGrid> st_outputs, const TemporalSNNParams& params);
bool temporal_response(std::span<const BinaryGrid> st_outputs, const TemporalSNNParams& params);

}  // namespace sgf::temporal
