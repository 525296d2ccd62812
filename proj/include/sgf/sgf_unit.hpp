#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgf/events.hpp"
#include "sgf/feature_vector.hpp"
#include "sgf/snn_spatial.hpp"
#include "sgf/snn_temporal.hpp"
#include "sgf/stcore.hpp"

namespace sgf {

/// Bitwise similarity used by the score. Nor counts slots where both the
/// stored and the test vector are zero; Xnor counts slots where they agree.
enum class Similarity { Nor, Xnor };

std::string_view to_string(Similarity s);
std::optional<Similarity> parse_similarity(std::string_view s);

/// A stored feature vector and how many training samples produced it.
struct GlobalFeatureNeuron {
    FeatureVector vector;
    std::uint64_t histogram = 0;
};

/// Output neuron of one label. Weights are valid after finalize().
class OutputNeuron {
public:
    OutputNeuron() = default;
    explicit OutputNeuron(int label) : label_(label) {}

    int label() const { return label_; }
    const std::vector<GlobalFeatureNeuron>& neurons() const { return neurons_; }
    const std::vector<double>& weights() const { return weights_; }
    std::uint64_t total() const;

    /// Adds one observation of `v`: a new global feature neuron with
    /// histogram 1, or +1 on the existing one.
    void train(const FeatureVector& v);
    void add(const FeatureVector& v, std::uint64_t histogram);

    /// w_j = h_j / sum_k h_k.
    void finalize();
    bool finalized() const { return weights_.size() == neurons_.size() && !neurons_.empty(); }

private:
    int label_ = 0;
    std::vector<GlobalFeatureNeuron> neurons_;
    std::vector<double> weights_;
};

/// S = sum_j popcount(op(T_j, V)) / L * w_j. Throws DataError on a length
/// mismatch.
double score(const FeatureVector& v, const OutputNeuron& neuron, Similarity similarity);

struct ScoredLabel {
    int label = 0;
    double score = 0.0;
};

/// Highest score wins; exact ties go to the lowest label.
int argmax_label(std::span<const ScoredLabel> scores);

enum class UnitId { A, B, C };

std::string_view to_string(UnitId id);

/// Output label of a unit with the gesture classes it stands for.
struct ClassGroup {
    int label = 0;
    std::vector<int> classes;
};

/// Feature-extraction configuration of a unit: its ST core and SNN banks.
/// Slot order is spatial slots (bank order) then temporal slots.
struct UnitNetwork {
    stcore::STCoreParams stcore;
    std::vector<spatial::SpatialSNNParams> spatial;
    std::vector<temporal::TemporalSNNParams> temporal;

    std::size_t slot_count() const { return spatial.size() + temporal.size(); }
    std::vector<std::string> slot_ids() const;
    void validate(const Geometry& geometry) const;
};

/// Feature vector from ST-core outputs. Temporal traces are shared between
/// slots with identical comparison parameters.
FeatureVector extract_from_st(const UnitNetwork& network, std::span<const BinaryGrid> st_outputs);

/// One hierarchy node: feature extraction, global feature neurons and the
/// histogram-trained output layer.
class SGFUnit {
public:
    SGFUnit() = default;
    SGFUnit(UnitId id, UnitNetwork network, std::vector<ClassGroup> groups);

    UnitId id() const { return id_; }
    const UnitNetwork& network() const { return network_; }
    const std::vector<ClassGroup>& groups() const { return groups_; }
    const std::map<int, OutputNeuron>& outputs() const { return outputs_; }
    std::size_t slot_count() const { return network_.slot_count(); }

    bool handles(int class_id) const;
    /// Output label for a gesture class; throws Error if not handled.
    int label_for_class(int class_id) const;
    const ClassGroup* group(int label) const;

    FeatureVector extract(std::span<const events::Frame> frames) const;
    FeatureVector extract_from_st(std::span<const BinaryGrid> st_outputs) const;

    void train_sample(const FeatureVector& v, int class_id);
    void restore(int label, const FeatureVector& v, std::uint64_t histogram);
    void finalize();
    bool trained() const { return !outputs_.empty(); }

    /// Scores of trained output neurons, optionally restricted to `allowed`.
    std::vector<ScoredLabel> scores(const FeatureVector& v, Similarity similarity,
                                    std::span<const int> allowed = {}) const;
    /// Throws Error if no allowed output neuron has been trained.
    int classify(const FeatureVector& v, Similarity similarity, std::span<const int> allowed = {}) const;

private:
    void check_length(const FeatureVector& v) const;

    UnitId id_ = UnitId::A;
    UnitNetwork network_;
    std::vector<ClassGroup> groups_;
    std::map<int, OutputNeuron> outputs_;
};

}  // namespace sgf
