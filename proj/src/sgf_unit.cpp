#include "sgf/sgf_unit.hpp"

#include <algorithm>
#include <tuple>

namespace sgf {

std::string_view to_string(Similarity s) { return s == Similarity::Nor ? "nor" : "xnor"; }

std::optional<Similarity> parse_similarity(std::string_view s) {
    if (s == "nor") {
        return Similarity::Nor;
    }
    if (s == "xnor") {
        return Similarity::Xnor;
    }
    return std::nullopt;
}

std::uint64_t OutputNeuron::total() const {
    std::uint64_t sum = 0;
    for (const auto& n : neurons_) {
        sum += n.histogram;
    }
    return sum;
}

void OutputNeuron::train(const FeatureVector& v) { add(v, 1); }

void OutputNeuron::add(const FeatureVector& v, std::uint64_t histogram) {
    for (auto& n : neurons_) {
        if (n.vector == v) {
            n.histogram += histogram;
            return;
        }
    }
    neurons_.push_back({v, histogram});
}

void OutputNeuron::finalize() {
    const double sum = static_cast<double>(total());
    weights_.clear();
    for (const auto& n : neurons_) {
        weights_.push_back(static_cast<double>(n.histogram) / sum);
    }
}

double score(const FeatureVector& v, const OutputNeuron& neuron, Similarity similarity) {
    const auto& neurons = neuron.neurons();
    const auto& weights = neuron.weights();
    if (weights.size() != neurons.size()) {
        throw Error("score: output neuron " + std::to_string(neuron.label()) + " is not finalized");
    }
    double s = 0.0;
    for (std::size_t j = 0; j < neurons.size(); ++j) {
        const FeatureVector& t = neurons[j].vector;
        if (t.size() != v.size()) {
            throw DataError("score: vector length " + std::to_string(v.size()) +
                            " does not match stored length " + std::to_string(t.size()));
        }
        if (v.size() == 0) {
            continue;
        }
        const std::size_t match = similarity == Similarity::Nor ? nor_count(t, v) : xnor_count(t, v);
        s += static_cast<double>(match) / static_cast<double>(v.size()) * weights[j];
    }
    return s;
}

int argmax_label(std::span<const ScoredLabel> scores) {
    if (scores.empty()) {
        throw Error("argmax over no output neurons");
    }
    const ScoredLabel* best = &scores.front();
    for (const auto& s : scores) {
        if (s.score > best->score || (s.score == best->score && s.label < best->label)) {
            best = &s;
        }
    }
    return best->label;
}

std::string_view to_string(UnitId id) {
    switch (id) {
        case UnitId::A:
            return "A";
        case UnitId::B:
            return "B";
        case UnitId::C:
            return "C";
    }
    return "?";
}

std::vector<std::string> UnitNetwork::slot_ids() const {
    std::vector<std::string> ids;
    for (const auto& s : spatial) {
        ids.push_back(s.feature_id);
    }
    for (const auto& t : temporal) {
        ids.push_back(t.feature_id);
    }
    return ids;
}

void UnitNetwork::validate(const Geometry& geometry) const {
    stcore::validate(stcore);
    for (const auto& s : spatial) {
        spatial::validate(s, geometry);
    }
    for (const auto& t : temporal) {
        temporal::validate(t, geometry);
    }
    auto ids = slot_ids();
    std::sort(ids.begin(), ids.end());
    if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
        throw ConfigError(*dup + ": duplicate feature id");
    }
}

FeatureVector extract_from_st(const UnitNetwork& network, std::span<const BinaryGrid> st_outputs) {
    FeatureVector v(network.slot_count());
    if (!network.spatial.empty()) {
        const CountGrid counts = spatial::accumulate(st_outputs);
        for (std::size_t k = 0; k < network.spatial.size(); ++k) {
            v.set(k, spatial::spatial_response(counts, network.spatial[k]));
        }
    }

    using TraceKey = std::tuple<std::uint32_t, std::uint32_t, std::uint32_t, std::uint32_t, int,
                                int, int, int, int>;
    std::map<TraceKey, temporal::LocationTrace> traces;
    auto trace_for = [&](temporal::TemporalSNNParams p, temporal::Axis axis) -> const auto& {
        p.axis = axis;
        const TraceKey key{p.region.x,
                           p.region.y,
                           p.region.width,
                           p.region.height,
                           static_cast<int>(axis),
                           static_cast<int>(p.direction),
                           p.delta_t,
                           p.theta_l,
                           p.theta_te};
        auto it = traces.find(key);
        if (it == traces.end()) {
            it = traces.emplace(key, temporal::location_trace(st_outputs, p)).first;
        }
        return it->second;
    };

    const std::size_t base = network.spatial.size();
    for (std::size_t k = 0; k < network.temporal.size(); ++k) {
        const auto& p = network.temporal[k];
        const auto& vertical = trace_for(p, temporal::Axis::Vertical);
        const auto& horizontal = trace_for(p, temporal::Axis::Horizontal);
        const auto observed = temporal::tokenize(vertical, horizontal, p.min_run);
        v.set(base + k, temporal::match_pattern(observed, p.reference));
    }
    return v;
}

SGFUnit::SGFUnit(UnitId id, UnitNetwork network, std::vector<ClassGroup> groups)
    : id_(id), network_(std::move(network)), groups_(std::move(groups)) {}

bool SGFUnit::handles(int class_id) const {
    return std::any_of(groups_.begin(), groups_.end(), [&](const ClassGroup& g) {
        return std::find(g.classes.begin(), g.classes.end(), class_id) != g.classes.end();
    });
}

int SGFUnit::label_for_class(int class_id) const {
    for (const auto& g : groups_) {
        if (std::find(g.classes.begin(), g.classes.end(), class_id) != g.classes.end()) {
            return g.label;
        }
    }
    throw Error("unit " + std::string(to_string(id_)) + " does not handle class " +
                std::to_string(class_id));
}

const ClassGroup* SGFUnit::group(int label) const {
    for (const auto& g : groups_) {
        if (g.label == label) {
            return &g;
        }
    }
    return nullptr;
}

FeatureVector SGFUnit::extract(std::span<const events::Frame> frames) const {
    if (frames.empty()) {
        throw DataError("feature extraction: no frames");
    }
    const auto st = stcore::st_filter(frames, network_.stcore);
    return extract_from_st(st);
}

FeatureVector SGFUnit::extract_from_st(std::span<const BinaryGrid> st_outputs) const {
    return sgf::extract_from_st(network_, st_outputs);
}

void SGFUnit::check_length(const FeatureVector& v) const {
    if (v.size() != slot_count()) {
        throw DataError("unit " + std::string(to_string(id_)) + ": vector length " +
                        std::to_string(v.size()) + " != " + std::to_string(slot_count()) +
                        " slots");
    }
}

void SGFUnit::train_sample(const FeatureVector& v, int class_id) {
    check_length(v);
    const int label = label_for_class(class_id);
    auto [it, inserted] = outputs_.try_emplace(label, label);
    it->second.train(v);
}

void SGFUnit::restore(int label, const FeatureVector& v, std::uint64_t histogram) {
    check_length(v);
    if (group(label) == nullptr) {
        throw DataError("unit " + std::string(to_string(id_)) + ": unknown label " +
                        std::to_string(label));
    }
    auto [it, inserted] = outputs_.try_emplace(label, label);
    it->second.add(v, histogram);
}

void SGFUnit::finalize() {
    for (auto& [label, neuron] : outputs_) {
        neuron.finalize();
    }
}

std::vector<ScoredLabel> SGFUnit::scores(const FeatureVector& v, Similarity similarity,
                                         std::span<const int> allowed) const {
    check_length(v);
    std::vector<ScoredLabel> out;
    for (const auto& [label, neuron] : outputs_) {
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), label) == allowed.end()) {
            continue;
        }
        out.push_back({label, score(v, neuron, similarity)});
    }
    return out;
}

int SGFUnit::classify(const FeatureVector& v, Similarity similarity, std::span<const int> allowed) const {
    const auto s = scores(v, similarity, allowed);
    if (s.empty()) {
        throw Error("unit " + std::string(to_string(id_)) + " has no trained output neuron");
    }
    return argmax_label(s);
}

}  // namespace sgf
