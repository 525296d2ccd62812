#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgf/common.hpp"
#include "sgf/events.hpp"

namespace sgf::aer {

/// Word layout: bits 14..8 column, bits 7..1 row, bit 0 polarity.
constexpr std::uint32_t kWordBits = 15;
constexpr std::uint32_t kWordCount = 1u << kWordBits;
constexpr std::uint32_t kMaxAddress = 127;

struct AerPacket {
    std::uint8_t col = 0;
    std::uint8_t row = 0;
    std::uint8_t polarity = 0;  // 1 for an ON (+1) event, 0 for OFF

    friend bool operator==(const AerPacket&, const AerPacket&) = default;
};

/// Throws DataError when a field is out of range.
std::uint16_t encode(const AerPacket& packet);
/// Throws DataError for words >= 2^15.
AerPacket decode(std::uint32_t word);

/// Throws DataError when the event lies outside the 7-bit address space.
AerPacket to_packet(const events::SpikeEvent& event);

/// Bounded single-producer/single-consumer queue of packet words.
class AerFifo {
public:
    explicit AerFifo(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return queue_.size(); }
    bool empty() const { return queue_.empty(); }
    bool full() const { return queue_.size() >= capacity_; }
    std::size_t high_watermark() const { return high_watermark_; }

    /// False (nothing stored) when full.
    bool push(std::uint16_t word);
    std::optional<std::uint16_t> pop();

private:
    std::size_t capacity_;
    std::deque<std::uint16_t> queue_;
    std::size_t high_watermark_ = 0;
};

struct DeliveryRecord {
    std::uint16_t word = 0;
    std::uint64_t enqueue_step = 0;
    std::uint64_t dequeue_step = 0;
};

struct DeliveryLog {
    std::vector<DeliveryRecord> records;  // in delivery order
    std::size_t high_watermark = 0;
    std::uint64_t steps = 0;
    bool complete = false;  // every word delivered before the step limit
};

/// Whether a side is ready at a given step.
using Schedule = std::function<bool(std::uint64_t step)>;

Schedule always_ready();

/// Moves `words` through `fifo` one tick at a time. In each tick the sender
/// pushes its next word if it is ready and the FIFO has room (otherwise it
/// blocks), then the receiver pops one word if it is ready. Nothing is ever
/// dropped; the run stops when everything has been delivered or after
/// `max_steps` ticks.
DeliveryLog fifo_transfer(std::span<const std::uint16_t> words, AerFifo& fifo,
                          const Schedule& sender_ready, const Schedule& receiver_ready,
                          std::uint64_t max_steps = 1'000'000'000);

class TranslationFault : public DataError {
public:
    using DataError::DataError;
};

/// Source address (col, row) to destination core address.
class AddressLut {
public:
    void map(std::uint8_t col, std::uint8_t row, std::uint32_t destination);
    std::optional<std::uint32_t> lookup(std::uint8_t col, std::uint8_t row) const;
    std::size_t size() const { return table_.size(); }

    /// Every pixel of `geometry` maps to its row-major index.
    static AddressLut identity(const Geometry& geometry);

private:
    std::map<std::pair<std::uint8_t, std::uint8_t>, std::uint32_t> table_;
};

/// Throws TranslationFault for an unmapped address.
std::uint32_t translate(const AddressLut& lut, const AerPacket& packet);

/// "t,XXXX" lines (hex word) for every event of the stream.
std::string dump_hex(const events::EventStream& stream);
/// Inverse of dump_hex; throws DataError naming the line on malformed input.
events::EventStream parse_hex(std::string_view text, Geometry geometry);

}  // namespace sgf::aer
