#include "sgf/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <thread>
#include <tuple>

#include "sgf/snn_spatial.hpp"
#include "sgf/snn_temporal.hpp"
#include "sgf/stcore.hpp"

namespace sgf::pipeline {

namespace {

/// Receives translated packets and cuts them into frames.
class StScheduler {
public:
    StScheduler(Geometry geometry, std::size_t spikes_per_frame)
        : geometry_(geometry), spf_(spikes_per_frame), current_(fresh(0)) {}

    void receive(std::uint32_t destination, std::uint8_t polarity) {
        current_.grid[destination] += polarity ? 1 : -1;
        current_.magnitude[destination] += 1;
        if (++filled_ == spf_) {
            frames_.push_back(std::move(current_));
            current_ = fresh(frames_.size());
            filled_ = 0;
        }
    }

    std::vector<events::Frame>& frames() { return frames_; }

private:
    events::Frame fresh(std::size_t index) const {
        return {index, CountGrid(geometry_, 0), CountGrid(geometry_, 0)};
    }

    Geometry geometry_;
    std::size_t spf_;
    events::Frame current_;
    std::size_t filled_ = 0;
    std::vector<events::Frame> frames_;
};

/// One SNN core evaluating a unit's sub-networks one after another. The
/// accumulated count grid and the location traces are scratch state shared
/// by every sub-network of the unit.
class SnnCore {
public:
    FeatureVector run(const UnitNetwork& net, std::span<const BinaryGrid> st) {
        traces_.clear();
        FeatureVector v(net.slot_count());
        std::size_t slot = 0;
        if (!net.spatial.empty()) {
            counts_ = spatial::accumulate(st);
            for (const auto& p : net.spatial) {
                v.set(slot++, spatial::gated_area(counts_, p) >= p.theta_a);
            }
        }
        for (const auto& p : net.temporal) {
            const auto& vertical = trace(st, p, temporal::Axis::Vertical);
            const auto& horizontal = trace(st, p, temporal::Axis::Horizontal);
            v.set(slot++, temporal::match_pattern(temporal::tokenize(vertical, horizontal, p.min_run),
                                                  p.reference));
        }
        return v;
    }

private:
    using Key = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t, int, int, int,
                           int, int>;

    const temporal::LocationTrace& trace(std::span<const BinaryGrid> st, temporal::TemporalSNNParams p,
                                         temporal::Axis axis) {
        p.axis = axis;
        const Region r = p.region.width == 0 ? Region::full(st.front().geometry()) : p.region;
        const Key key{r.x,
                      r.y,
                      r.width,
                      r.height,
                      static_cast<int>(axis),
                      static_cast<int>(p.direction),
                      p.delta_t,
                      p.theta_l,
                      p.theta_te};
        auto it = traces_.find(key);
        if (it == traces_.end()) {
            it = traces_.emplace(key, temporal::location_trace(st, p)).first;
        }
        return it->second;
    }

    CountGrid counts_;
    std::map<Key, temporal::LocationTrace> traces_;
};

/// Stored vectors of one unit flattened into a table for the score unit.
class DecodingLut {
public:
    struct Entry {
        int label = 0;
        std::vector<std::uint8_t> bits;
        double weight = 0.0;
    };

    explicit DecodingLut(const SGFUnit& unit) : unit_(&unit) {
        for (const auto& [label, neuron] : unit.outputs()) {
            OutputNeuron copy = neuron;
            if (!copy.finalized()) {
                copy.finalize();
            }
            for (std::size_t j = 0; j < copy.neurons().size(); ++j) {
                const FeatureVector& t = copy.neurons()[j].vector;
                Entry e{label, std::vector<std::uint8_t>(t.size()), copy.weights()[j]};
                for (std::size_t i = 0; i < t.size(); ++i) {
                    e.bits[i] = t.test(i) ? 1 : 0;
                }
                entries_.push_back(std::move(e));
            }
        }
    }

    std::vector<ScoredLabel> scores(const FeatureVector& v, Similarity sim,
                                    std::span<const int> allowed) const {
        std::map<int, double> sums;
        for (const auto& e : entries_) {
            if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), e.label) == allowed.end()) {
                continue;
            }
            if (e.bits.size() != v.size()) {
                throw DataError("decoding: vector length mismatch");
            }
            std::size_t match = 0;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const bool a = e.bits[i] != 0;
                const bool b = v.test(i);
                match += sim == Similarity::Nor ? (!a && !b) : (a == b);
            }
            const double term =
                v.size() ? static_cast<double>(match) / static_cast<double>(v.size()) * e.weight : 0.0;
            sums[e.label] += term;
        }
        std::vector<ScoredLabel> out;
        for (const auto& [label, s] : sums) {
            out.push_back({label, s});
        }
        return out;
    }

    /// Highest score; the lowest label wins ties.
    static int compare(std::span<const ScoredLabel> scores) {
        int best = scores.front().label;
        double best_score = scores.front().score;
        for (const auto& s : scores) {
            if (s.score > best_score || (s.score == best_score && s.label < best)) {
                best = s.label;
                best_score = s.score;
            }
        }
        return best;
    }

    const SGFUnit& unit() const { return *unit_; }

private:
    const SGFUnit* unit_;
    std::vector<Entry> entries_;
};

}  // namespace

InferenceResult run_inference(const events::EventStream& stream, const SgfModel& model,
                              const PipelineConfig& config) {
    const NetworkConfig& net = model.config();
    if (!(stream.geometry == net.geometry)) {
        throw DataError("pipeline: stream geometry " + std::to_string(stream.geometry.width) + "x" +
                        std::to_string(stream.geometry.height) + " does not match the model geometry " +
                        std::to_string(net.geometry.width) + "x" + std::to_string(net.geometry.height));
    }
    events::validate_stream(stream);
    const std::size_t spf = net.spikes_per_frame;
    const std::size_t usable = stream.events.size() / spf * spf;
    if (usable == 0) {
        throw DataError("pipeline: stream has " + std::to_string(stream.events.size()) +
                        " events, fewer than one frame of " + std::to_string(spf));
    }

    InferenceResult result;
    result.stats.events_in = stream.events.size();

    // AER link.
    std::vector<std::uint16_t> words;
    words.reserve(usable);
    for (std::size_t i = 0; i < usable; ++i) {
        words.push_back(aer::encode(aer::to_packet(stream.events[i])));
    }
    aer::AerFifo fifo(config.fifo_capacity);
    const aer::Schedule ready = aer::always_ready();
    const auto log = aer::fifo_transfer(words, fifo, config.sender_ready ? config.sender_ready : ready,
                                        config.receiver_ready ? config.receiver_ready : ready);
    if (!log.complete) {
        throw Error("pipeline: AER transfer did not finish within the step limit");
    }
    result.stats.packets_transferred = log.records.size();
    result.stats.fifo_high_watermark = log.high_watermark;
    result.stats.transfer_steps = log.steps;

    // Address translation and frame assembly.
    const aer::AddressLut lut = aer::AddressLut::identity(net.geometry);
    StScheduler scheduler(net.geometry, spf);
    for (const auto& rec : log.records) {
        const aer::AerPacket p = aer::decode(rec.word);
        scheduler.receive(aer::translate(lut, p), p.polarity);
    }
    const auto& frames = scheduler.frames();
    result.stats.frames_processed = frames.size();

    // SGF unit processor and decoding module.
    const Similarity sim = config.similarity.value_or(model.similarity());
    SnnCore core;
    auto st_for = [&](const UnitNetwork& unit_net) { return stcore::st_filter(frames, unit_net.stcore); };

    const DecodingLut lut_a(model.unit(UnitId::A));
    if (!model.unit(UnitId::A).trained()) {
        throw UntrainedRoute("unit A is untrained");
    }
    const auto st_a = st_for(net.unit_a);
    result.vector_a = core.run(net.unit_a, st_a);
    result.path.push_back(UnitId::A);
    result.scores_a = lut_a.scores(result.vector_a, sim, {});
    result.scores = result.scores_a;
    const int group_label = DecodingLut::compare(result.scores_a);
    const ClassGroup* group = model.unit(UnitId::A).group(group_label);
    if (group->classes.size() == 1) {
        result.class_id = group->classes.front();
        return result;
    }

    const auto next = downstream_unit(group->classes.front());
    const UnitNetwork& next_net = net.unit(*next);
    const DecodingLut lut_next(model.unit(*next));
    const auto st_next = next_net.stcore == net.unit_a.stcore ? st_a : st_for(next_net);
    result.vector_downstream = core.run(next_net, st_next);
    result.path.push_back(*next);
    result.scores = lut_next.scores(*result.vector_downstream, sim, group->classes);
    if (result.scores.empty()) {
        throw UntrainedRoute("unit " + std::string(to_string(*next)) +
                             " has no trained output neuron for the selected group");
    }
    result.class_id = DecodingLut::compare(result.scores);
    return result;
}

BatchSummary run_batch(std::span<const events::EventStream> streams, const SgfModel& model,
                       const PipelineConfig& config, unsigned jobs) {
    for (std::size_t i = 0; i < streams.size(); ++i) {
        if (!streams[i].label || *streams[i].label < 1 ||
            *streams[i].label >= static_cast<int>(kConfusionSize)) {
            throw DataError("batch sample " + std::to_string(i) + " has no valid label");
        }
    }
    std::vector<int> predictions(streams.size(), 0);
    std::vector<std::exception_ptr> errors(streams.size());
    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < streams.size(); i += stride) {
            try {
                predictions[i] = run_inference(streams[i], model, config).class_id;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(streams.size(), 1))));
    if (jobs == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(work, j, jobs);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    BatchSummary s;
    s.samples = streams.size();
    s.predictions = std::move(predictions);
    for (std::size_t i = 0; i < streams.size(); ++i) {
        const int truth = *streams[i].label;
        const int pred = s.predictions[i];
        ++s.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(pred)];
        s.correct += truth == pred;
    }
    s.accuracy = s.samples ? static_cast<double>(s.correct) / static_cast<double>(s.samples) : 0.0;
    return s;
}

}  // namespace sgf::pipeline
