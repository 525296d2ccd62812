#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sgf/aer.hpp"
#include "sgf/events.hpp"
#include "sgf/sgf_model.hpp"

namespace sgf::pipeline {

struct PipelineConfig {
    std::size_t fifo_capacity = 64;
    /// Overrides the model's similarity operator when set.
    std::optional<Similarity> similarity;
    /// Readiness of the AER sender and receiver per step; empty means always ready.
    aer::Schedule sender_ready;
    aer::Schedule receiver_ready;
};

struct PipelineStats {
    std::size_t events_in = 0;
    std::size_t packets_transferred = 0;  // events that fill whole frames
    std::size_t fifo_high_watermark = 0;
    std::uint64_t transfer_steps = 0;
    std::size_t frames_processed = 0;
};

struct InferenceResult {
    int class_id = 0;
    std::vector<UnitId> path;
    std::vector<ScoredLabel> scores_a;
    std::vector<ScoredLabel> scores;  // last unit on the path
    FeatureVector vector_a;
    std::optional<FeatureVector> vector_downstream;
    PipelineStats stats;
};

/// Streams the events through the AER link, the ST scheduler and the
/// time-multiplexed SNN cores, then decodes the class with a lookup table of
/// the model's stored vectors. Throws DataError when the stream fills no
/// frame or does not match the model geometry, UntrainedRoute when the
/// selected group has no trained output neuron.
InferenceResult run_inference(const events::EventStream& stream, const SgfModel& model,
                              const PipelineConfig& config = {});

constexpr std::size_t kConfusionSize = 11;

struct BatchSummary {
    std::size_t samples = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    /// confusion[truth][predicted], indexed by class id 1..10.
    std::array<std::array<std::size_t, kConfusionSize>, kConfusionSize> confusion{};
    std::vector<int> predictions;  // in input order
};

/// Every stream must carry a label. `jobs` > 1 runs samples on separate
/// pipeline instances; results are merged in input order.
BatchSummary run_batch(std::span<const events::EventStream> streams, const SgfModel& model,
                       const PipelineConfig& config = {}, unsigned jobs = 1);

}  // namespace sgf::pipeline
