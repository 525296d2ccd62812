#include "sgf/aer.hpp"

#include <charconv>
#include <cstdio>

namespace sgf::aer {

std::uint16_t encode(const AerPacket& p) {
    if (p.col > kMaxAddress || p.row > kMaxAddress || p.polarity > 1) {
        throw DataError("aer: packet field out of range (col " + std::to_string(p.col) + ", row " +
                        std::to_string(p.row) + ", polarity " + std::to_string(p.polarity) + ")");
    }
    return static_cast<std::uint16_t>((p.col << 8) | (p.row << 1) | p.polarity);
}

AerPacket decode(std::uint32_t word) {
    if (word >= kWordCount) {
        throw DataError("aer: word " + std::to_string(word) + " exceeds 15 bits");
    }
    return {static_cast<std::uint8_t>(word >> 8), static_cast<std::uint8_t>((word >> 1) & 0x7F),
            static_cast<std::uint8_t>(word & 1)};
}

AerPacket to_packet(const events::SpikeEvent& e) {
    if (e.x > kMaxAddress || e.y > kMaxAddress) {
        throw DataError("aer: address (" + std::to_string(e.x) + "," + std::to_string(e.y) +
                        ") does not fit 7 bits");
    }
    return {static_cast<std::uint8_t>(e.x), static_cast<std::uint8_t>(e.y),
            static_cast<std::uint8_t>(e.polarity > 0 ? 1 : 0)};
}

AerFifo::AerFifo(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw ConfigError("aer.fifo_capacity: must be >= 1");
    }
}

bool AerFifo::push(std::uint16_t word) {
    if (full()) {
        return false;
    }
    queue_.push_back(word);
    high_watermark_ = std::max(high_watermark_, queue_.size());
    return true;
}

std::optional<std::uint16_t> AerFifo::pop() {
    if (queue_.empty()) {
        return std::nullopt;
    }
    const std::uint16_t w = queue_.front();
    queue_.pop_front();
    return w;
}

Schedule always_ready() {
    return [](std::uint64_t) { return true; };
}

DeliveryLog fifo_transfer(std::span<const std::uint16_t> words, AerFifo& fifo,
                          const Schedule& sender_ready, const Schedule& receiver_ready,
                          std::uint64_t max_steps) {
    DeliveryLog log;
    log.records.reserve(words.size());
    std::deque<std::uint64_t> in_flight;  // enqueue steps of queued words
    std::size_t next = 0;
    std::uint64_t step = 0;
    while (log.records.size() < words.size() && step < max_steps) {
        if (next < words.size() && sender_ready(step) && fifo.push(words[next])) {
            in_flight.push_back(step);
            ++next;
        }
        if (receiver_ready(step)) {
            if (auto w = fifo.pop()) {
                log.records.push_back({*w, in_flight.front(), step});
                in_flight.pop_front();
            }
        }
        ++step;
    }
    log.steps = step;
    log.high_watermark = fifo.high_watermark();
    log.complete = log.records.size() == words.size();
    return log;
}

void AddressLut::map(std::uint8_t col, std::uint8_t row, std::uint32_t destination) {
    table_[{col, row}] = destination;
}

std::optional<std::uint32_t> AddressLut::lookup(std::uint8_t col, std::uint8_t row) const {
    const auto it = table_.find({col, row});
    if (it == table_.end()) {
        return std::nullopt;
    }
    return it->second;
}

AddressLut AddressLut::identity(const Geometry& g) {
    if (g.width > kMaxAddress + 1 || g.height > kMaxAddress + 1) {
        throw ConfigError("geometry: AER addresses cover at most 128x128 pixels");
    }
    AddressLut lut;
    for (std::uint32_t y = 0; y < g.height; ++y) {
        for (std::uint32_t x = 0; x < g.width; ++x) {
            lut.map(static_cast<std::uint8_t>(x), static_cast<std::uint8_t>(y), y * g.width + x);
        }
    }
    return lut;
}

std::uint32_t translate(const AddressLut& lut, const AerPacket& p) {
    if (auto d = lut.lookup(p.col, p.row)) {
        return *d;
    }
    throw TranslationFault("aer: no destination for address (" + std::to_string(p.col) + "," +
                           std::to_string(p.row) + ")");
}

std::string dump_hex(const events::EventStream& stream) {
    std::string out;
    char line[64];
    for (const auto& e : stream.events) {
        std::snprintf(line, sizeof line, "%llu,%04X\n", static_cast<unsigned long long>(e.t),
                      encode(to_packet(e)));
        out += line;
    }
    return out;
}

events::EventStream parse_hex(std::string_view text, Geometry geometry) {
    events::EventStream stream;
    stream.geometry = geometry;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto fail = [&](const std::string& what) {
            return DataError("line " + std::to_string(line_no) + ": " + what);
        };
        const auto comma = line.find(',');
        if (comma == std::string_view::npos) {
            throw fail("expected \"t,WORD\"");
        }
        std::uint64_t t = 0;
        std::uint32_t word = 0;
        const auto ts = line.substr(0, comma);
        const auto ws = line.substr(comma + 1);
        if (auto r = std::from_chars(ts.data(), ts.data() + ts.size(), t);
            r.ec != std::errc{} || r.ptr != ts.data() + ts.size()) {
            throw fail("bad timestamp");
        }
        if (auto r = std::from_chars(ws.data(), ws.data() + ws.size(), word, 16);
            r.ec != std::errc{} || r.ptr != ws.data() + ws.size() || ws.empty()) {
            throw fail("bad hex word");
        }
        AerPacket p;
        try {
            p = decode(word);
        } catch (const DataError& e) {
            throw fail(e.what());
        }
        if (!geometry.contains(p.col, p.row)) {
            throw fail("address outside the sensor geometry");
        }
        if (!stream.events.empty() && t < stream.events.back().t) {
            throw fail("timestamp decreases");
        }
        stream.events.push_back({t, p.col, p.row, static_cast<std::int8_t>(p.polarity ? 1 : -1)});
    }
    return stream;
}

}  // namespace sgf::aer
