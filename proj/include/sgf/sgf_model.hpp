#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgf/events.hpp"
#include "sgf/sgf_unit.hpp"

namespace sgf {

/// Raised when unit A selects a group whose downstream unit holds no
/// trained output neuron.
class UntrainedRoute : public Error {
public:
    using Error::Error;
};

/// Parameters of the E/F bank: one variant per combination of the listed
/// values, repeated for the left and right half of the frame. Each variant
/// yields one E (clockwise) and one F (counter-clockwise) slot, so the
/// defaults give 80 + 80 slots.
struct RotationBankLayout {
    std::vector<int> delta_t{1, 2};
    std::vector<int> theta_l{0, 1};
    std::vector<int> theta_te{1, 2, 4, 8, 16};
    std::vector<int> min_run{3, 5};
    std::uint32_t overlap = 4;  // pixels each half region extends past the midline
};

std::vector<temporal::TemporalSNNParams> make_rotation_bank(const RotationBankLayout& layout,
                                                            const Geometry& geometry);

/// H/I/J/K direction detectors over the whole frame.
struct DirectionBankLayout {
    int delta_t = 1;
    int theta_l = 0;
    int theta_te = 4;
    int min_run = 3;
};

std::vector<temporal::TemporalSNNParams> make_direction_bank(const DirectionBankLayout& layout);

struct NetworkConfig {
    Geometry geometry{64, 64};
    std::size_t spikes_per_frame = 1000;
    Similarity similarity = Similarity::Nor;
    UnitNetwork unit_a;
    UnitNetwork unit_b;
    UnitNetwork unit_c;

    void validate() const;
    const UnitNetwork& unit(UnitId id) const;
};

/// Tunable description from which the three unit networks are built.
struct NetworkLayout {
    Geometry geometry{64, 64};
    std::size_t spikes_per_frame = 1000;
    Similarity similarity = Similarity::Nor;
    stcore::STCoreParams stcore_a{1, 1, 2, 2, false};
    stcore::STCoreParams stcore_b{1, 8, 2, 2, false};
    stcore::STCoreParams stcore_c{1, 8, 2, 2, false};
    spatial::BankLayout ad;
    spatial::BankLayout bc;
    std::vector<spatial::SpatialSNNParams> g;
    RotationBankLayout ef;
    DirectionBankLayout hijk;
};

/// Bank sizes scaled to `geometry`.
NetworkLayout default_layout(Geometry geometry = {64, 64});

/// Unit A holds the A/D, B/C and G spatial banks; unit B the E/F slots;
/// unit C the A/D, B/C and G banks plus the H/I/J/K slots.
NetworkConfig build_network(const NetworkLayout& layout);
NetworkConfig default_network(Geometry geometry = {64, 64});

/// Unit A output labels 1..4 stand for the groups {3}, {4,5}, {6,7},
/// {1,2,8,9,10}; units B and C use one label per class.
std::vector<ClassGroup> unit_a_groups();
std::vector<ClassGroup> unit_b_groups();
std::vector<ClassGroup> unit_c_groups();

/// Downstream unit that refines a class, if any.
std::optional<UnitId> downstream_unit(int class_id);

struct RouteResult {
    int class_id = 0;
    int group_label = 0;
    std::vector<UnitId> path;
    FeatureVector vector_a;
    std::optional<FeatureVector> vector_downstream;
    std::vector<ScoredLabel> scores_a;
    std::vector<ScoredLabel> scores_downstream;
};

/// Vectors a sample produces in the units that handle `class_id`.
struct SampleVectors {
    FeatureVector a;
    std::optional<UnitId> downstream;
    std::optional<FeatureVector> downstream_vector;
};

struct KnowledgeRow {
    std::size_t trial = 0;  // 1-based sample index within the class
    int class_id = 0;
    std::size_t distinct_vectors = 0;
};

class SgfModel {
public:
    explicit SgfModel(NetworkConfig config);

    const NetworkConfig& config() const { return config_; }
    Similarity similarity() const { return config_.similarity; }
    void set_similarity(Similarity s) { config_.similarity = s; }

    const SGFUnit& unit(UnitId id) const;

    /// Vectors for training a sample of `class_id` (unit A plus its
    /// downstream unit, if any).
    SampleVectors extract(std::span<const events::Frame> frames, int class_id) const;

    /// Single pass over one labelled sample; no weights are touched until
    /// finalize().
    void train_sample(std::span<const events::Frame> frames, int class_id);
    void train_vectors(const SampleVectors& vectors, int class_id);
    void finalize();
    bool finalized() const { return finalized_; }

    /// Unit A picks a group; {3} is final, rotation groups go to unit B and
    /// the remaining group to unit C, each restricted to the group's classes.
    RouteResult route(std::span<const events::Frame> frames) const;
    /// Same decision from precomputed vectors; `downstream` is called only
    /// when the chosen group needs refinement.
    RouteResult route_vectors(const FeatureVector& vector_a,
                              const std::function<FeatureVector(UnitId)>& downstream) const;

    const std::vector<KnowledgeRow>& knowledge_report() const { return knowledge_; }

    void save(std::ostream& out) const;
    /// Reads a model written by save(). The slot ids stored in the file must
    /// match `config`; the similarity operator comes from the file.
    static SgfModel load(std::istream& in, NetworkConfig config);

private:
    static constexpr std::size_t kClassSlots = 11;  // index by class id 1..10

    SGFUnit& unit_mut(UnitId id);
    void record_knowledge(const SampleVectors& v, int class_id);

    NetworkConfig config_;
    SGFUnit a_;
    SGFUnit b_;
    SGFUnit c_;
    bool finalized_ = false;

    struct ClassKnowledge {
        std::size_t trials = 0;
        std::vector<std::pair<int, FeatureVector>> seen;  // (unit, vector)
    };
    std::vector<ClassKnowledge> per_class_;
    std::vector<KnowledgeRow> knowledge_;
};

/// Trains on every labelled stream in arrival order (one pass), then
/// finalizes the weights.
void online_learn(std::span<const events::EventStream> samples, SgfModel& model);

std::string knowledge_csv(std::span<const KnowledgeRow> rows);

}  // namespace sgf
