#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sgf/common.hpp"

namespace sgf::events {

/// One DVS output: timestamp in microseconds, pixel address and a +/-1 polarity.
struct SpikeEvent {
    std::uint64_t t = 0;
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    std::int8_t polarity = 1;

    friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

struct EventStream {
    Geometry geometry;
    std::vector<SpikeEvent> events;  // non-decreasing in t
    std::optional<int> label;        // gesture class 1..10 when known
};

/// A bin of consecutive events rendered on the pixel grid.
///
/// `grid` holds the signed polarity sum per pixel. `magnitude` holds the
/// per-pixel event count (sum of |d|); its total equals the number of events
/// binned into the frame even when opposite polarities land on one pixel.
struct Frame {
    std::size_t index = 0;
    CountGrid grid;
    CountGrid magnitude;

    std::int64_t event_count() const;
};

/// Parses line records "t,x,y,p". Polarity 0/1 is mapped to -1/+1.
/// Throws DataError naming the 1-based line number on any malformed record,
/// out-of-geometry coordinate or decreasing timestamp.
EventStream parse_event_stream(std::string_view text, Geometry geometry);

/// Inverse of parse_event_stream: one "t,x,y,p" line per event, LF terminated.
std::string serialize_event_stream(const EventStream& stream);

/// Checks the stream invariants (geometry bounds, sorted timestamps, polarity).
void validate_stream(const EventStream& stream);

/// Splits the stream into frames of exactly `spikes_per_frame` events.
/// A trailing partial run is dropped.
std::vector<Frame> bin_frames(const EventStream& stream, std::size_t spikes_per_frame = 1000);

/// Loader hook: maps a file extension (".csv", ".txt", ...) to a reader.
/// Real recordings in other containers can be plugged in by registering a
/// loader for their extension.
using Loader = std::function<EventStream(const std::filesystem::path&, Geometry)>;

void register_loader(const std::string& extension, Loader loader);
EventStream load_event_file(const std::filesystem::path& path, Geometry geometry);
void save_event_file(const std::filesystem::path& path, const EventStream& stream);

}  // namespace sgf::events
