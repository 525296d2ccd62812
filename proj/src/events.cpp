#include "sgf/events.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace sgf::events {

namespace {

std::string line_error(std::size_t line, const std::string& what) {
    return "line " + std::to_string(line) + ": " + what;
}

template <typename T>
bool parse_int(std::string_view field, T& out) {
    if (field.empty()) {
        return false;
    }
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

std::int64_t Frame::event_count() const {
    std::int64_t total = 0;
    for (auto v : magnitude.cells()) {
        total += v;
    }
    return total;
}

EventStream parse_event_stream(std::string_view text, Geometry geometry) {
    if (geometry.empty()) {
        throw DataError("event stream geometry must be non-empty");
    }
    EventStream stream;
    stream.geometry = geometry;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        ++line_no;
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;

        std::string_view fields[4];
        std::size_t n = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                if (n == 4) {
                    throw DataError(line_error(line_no, "expected 4 fields \"t,x,y,p\""));
                }
                fields[n++] = line.substr(start, i - start);
                start = i + 1;
            }
        }
        if (n != 4) {
            throw DataError(line_error(line_no, "expected 4 fields \"t,x,y,p\""));
        }

        std::uint64_t t = 0;
        std::int64_t x = 0;
        std::int64_t y = 0;
        int p = 0;
        if (!parse_int(fields[0], t) || !parse_int(fields[1], x) || !parse_int(fields[2], y) ||
            !parse_int(fields[3], p)) {
            throw DataError(line_error(line_no, "non-integer field"));
        }
        if (!geometry.contains(x, y)) {
            throw DataError(line_error(line_no, "coordinate (" + std::to_string(x) + "," +
                                                    std::to_string(y) + ") outside " +
                                                    std::to_string(geometry.width) + "x" +
                                                    std::to_string(geometry.height)));
        }
        std::int8_t polarity = 0;
        switch (p) {
            case -1:
            case 0:
                polarity = -1;
                break;
            case 1:
                polarity = 1;
                break;
            default:
                throw DataError(line_error(line_no, "polarity must be -1, 0 or 1"));
        }
        if (!stream.events.empty() && t < stream.events.back().t) {
            throw DataError(line_error(line_no, "timestamp decreases"));
        }
        stream.events.push_back({t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                                 polarity});
    }
    return stream;
}

std::string serialize_event_stream(const EventStream& stream) {
    std::string out;
    out.reserve(stream.events.size() * 16);
    char buf[64];
    for (const auto& e : stream.events) {
        int n = std::snprintf(buf, sizeof buf, "%llu,%u,%u,%d\n",
                              static_cast<unsigned long long>(e.t), unsigned{e.x}, unsigned{e.y},
                              int{e.polarity});
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

void validate_stream(const EventStream& stream) {
    if (stream.geometry.empty()) {
        throw DataError("event stream geometry must be non-empty");
    }
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        const auto& e = stream.events[i];
        if (!stream.geometry.contains(e.x, e.y)) {
            throw DataError("event " + std::to_string(i) + ": coordinate outside geometry");
        }
        if (e.polarity != 1 && e.polarity != -1) {
            throw DataError("event " + std::to_string(i) + ": polarity must be -1 or +1");
        }
        if (i > 0 && e.t < stream.events[i - 1].t) {
            throw DataError("event " + std::to_string(i) + ": timestamp decreases");
        }
    }
}

std::vector<Frame> bin_frames(const EventStream& stream, std::size_t spikes_per_frame) {
    if (spikes_per_frame == 0) {
        throw DataError("spikes_per_frame must be at least 1");
    }
    const std::size_t count = stream.events.size() / spikes_per_frame;
    std::vector<Frame> frames;
    frames.reserve(count);
    for (std::size_t f = 0; f < count; ++f) {
        Frame frame{f, CountGrid(stream.geometry), CountGrid(stream.geometry)};
        for (std::size_t i = f * spikes_per_frame; i < (f + 1) * spikes_per_frame; ++i) {
            const auto& e = stream.events[i];
            frame.grid.at(e.x, e.y) += e.polarity;
            frame.magnitude.at(e.x, e.y) += 1;
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

namespace {

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(path.string() + ": cannot open");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

EventStream load_text(const std::filesystem::path& path, Geometry geometry) {
    try {
        return parse_event_stream(read_text(path), geometry);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

struct LoaderTable {
    std::mutex mutex;
    std::map<std::string, Loader> loaders{{".csv", load_text}, {".txt", load_text},
                                          {".events", load_text}, {"", load_text}};
};

LoaderTable& loader_table() {
    static LoaderTable table;
    return table;
}

}  // namespace

void register_loader(const std::string& extension, Loader loader) {
    auto& table = loader_table();
    std::lock_guard lock(table.mutex);
    table.loaders[extension] = std::move(loader);
}

EventStream load_event_file(const std::filesystem::path& path, Geometry geometry) {
    Loader loader;
    {
        auto& table = loader_table();
        std::lock_guard lock(table.mutex);
        auto it = table.loaders.find(path.extension().string());
        // Unknown extensions fall back to the line-record reader.
        loader = it != table.loaders.end() ? it->second : Loader(load_text);
    }
    return loader(path, geometry);
}

void save_event_file(const std::filesystem::path& path, const EventStream& stream) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(path.string() + ": cannot open for writing");
    }
    out << serialize_event_stream(stream);
}

}  // namespace sgf::events
