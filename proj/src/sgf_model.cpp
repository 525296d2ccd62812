#include "sgf/sgf_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "sgf/snn_spatial.hpp"

namespace sgf {

namespace {

using temporal::Axis;
using temporal::Direction;
using temporal::TemporalSNNParams;
using temporal::Token;

constexpr int kModelVersion = 1;

std::vector<spatial::SpatialSNNParams> default_g_bank(const Geometry& g) {
    // Two fixed constrained spots on the vertical midline: lower and upper.
    const std::uint32_t w = g.width / 4;
    const std::uint32_t h = g.height / 4;
    const std::uint32_t x = (g.width - w) / 2;
    std::vector<spatial::SpatialSNNParams> bank(2);
    bank[0] = {"G1", {x, g.height - h - g.height / 8, w, h}, 30, 8,
               spatial::SpatialArchetype::LocationSpecific};
    bank[1] = {"G2", {x, g.height / 8, w, h}, 30, 8, spatial::SpatialArchetype::LocationSpecific};
    return bank;
}

}  // namespace

std::vector<TemporalSNNParams> make_rotation_bank(const RotationBankLayout& layout, const Geometry& geometry) {
    const std::uint32_t half = geometry.width / 2;
    const std::uint32_t span = std::min(half + layout.overlap, geometry.width);
    const Region regions[2] = {{0, 0, span, geometry.height},
                               {geometry.width - span, 0, span, geometry.height}};

    std::vector<TemporalSNNParams> variants;
    for (const Region& region : regions) {
        for (int dt : layout.delta_t) {
            for (int tl : layout.theta_l) {
                for (int te : layout.theta_te) {
                    for (int run : layout.min_run) {
                        TemporalSNNParams p;
                        p.axis = Axis::Vertical;
                        p.direction = Direction::Increasing;
                        p.delta_t = dt;
                        p.theta_l = tl;
                        p.theta_te = te;
                        p.region = region;
                        p.min_run = run;
                        variants.push_back(p);
                    }
                }
            }
        }
    }

    std::vector<TemporalSNNParams> cw;
    std::vector<TemporalSNNParams> ccw;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        TemporalSNNParams p = variants[i];
        p.feature_id = "E" + std::to_string(i + 1);
        p.reference = temporal::clockwise_pattern();
        cw.push_back(p);
        p.feature_id = "F" + std::to_string(i + 1);
        p.reference = temporal::counter_clockwise_pattern();
        ccw.push_back(p);
    }
    cw.insert(cw.end(), ccw.begin(), ccw.end());
    return cw;
}

std::vector<TemporalSNNParams> make_direction_bank(const DirectionBankLayout& layout) {
    struct Spec {
        const char* id;
        Axis axis;
        Direction direction;
        Token token;
    };
    static constexpr Spec specs[] = {
        {"H", Axis::Vertical, Direction::Increasing, Token::TD},
        {"I", Axis::Vertical, Direction::Decreasing, Token::BU},
        {"J", Axis::Horizontal, Direction::Increasing, Token::LR},
        {"K", Axis::Horizontal, Direction::Decreasing, Token::RL},
    };
    std::vector<TemporalSNNParams> bank;
    for (const auto& s : specs) {
        TemporalSNNParams p;
        p.feature_id = s.id;
        p.axis = s.axis;
        p.direction = s.direction;
        p.delta_t = layout.delta_t;
        p.theta_l = layout.theta_l;
        p.theta_te = layout.theta_te;
        p.min_run = layout.min_run;
        p.reference = {{s.token}, {}};
        bank.push_back(std::move(p));
    }
    return bank;
}

void NetworkConfig::validate() const {
    if (geometry.empty()) {
        throw ConfigError("geometry: width and height must be positive");
    }
    if (spikes_per_frame == 0) {
        throw ConfigError("geometry.spikes_per_frame: must be >= 1");
    }
    unit_a.validate(geometry);
    unit_b.validate(geometry);
    unit_c.validate(geometry);
}

const UnitNetwork& NetworkConfig::unit(UnitId id) const {
    switch (id) {
        case UnitId::A:
            return unit_a;
        case UnitId::B:
            return unit_b;
        case UnitId::C:
            return unit_c;
    }
    return unit_a;
}

NetworkLayout default_layout(Geometry geometry) {
    NetworkLayout layout;
    layout.geometry = geometry;

    layout.ad.prefix = "A";
    layout.ad.right_prefix = "D";
    layout.ad.cols = 2;
    layout.ad.rows = 4;
    layout.ad.tile_width = geometry.width * 5 / 16;
    layout.ad.tile_height = geometry.height * 5 / 16;
    layout.ad.theta_i = 30;
    layout.ad.theta_a = 8;
    layout.ad.archetype = spatial::SpatialArchetype::ConstrainedIntensive;

    layout.bc.prefix = "B";
    layout.bc.right_prefix = "C";
    layout.bc.cols = 3;
    layout.bc.rows = 3;
    layout.bc.tile_width = geometry.width * 3 / 8;
    layout.bc.tile_height = geometry.height / 2;
    layout.bc.theta_i = 3;
    layout.bc.theta_a = 150;
    layout.bc.archetype = spatial::SpatialArchetype::PlateauMild;

    layout.g = default_g_bank(geometry);
    return layout;
}

NetworkConfig build_network(const NetworkLayout& layout) {
    NetworkConfig config;
    config.geometry = layout.geometry;
    config.spikes_per_frame = layout.spikes_per_frame;
    config.similarity = layout.similarity;

    const auto ad = spatial::make_half_tiled_bank(layout.ad, layout.geometry);
    const auto bc = spatial::make_half_tiled_bank(layout.bc, layout.geometry);
    std::vector<spatial::SpatialSNNParams> spatial_bank = ad;
    spatial_bank.insert(spatial_bank.end(), bc.begin(), bc.end());
    spatial_bank.insert(spatial_bank.end(), layout.g.begin(), layout.g.end());

    config.unit_a.stcore = layout.stcore_a;
    config.unit_a.spatial = spatial_bank;

    config.unit_b.stcore = layout.stcore_b;
    config.unit_b.temporal = make_rotation_bank(layout.ef, layout.geometry);

    config.unit_c.stcore = layout.stcore_c;
    config.unit_c.spatial = spatial_bank;
    config.unit_c.temporal = make_direction_bank(layout.hijk);
    config.validate();
    return config;
}

NetworkConfig default_network(Geometry geometry) { return build_network(default_layout(geometry)); }

std::vector<ClassGroup> unit_a_groups() {
    return {{1, {3}}, {2, {4, 5}}, {3, {6, 7}}, {4, {1, 2, 8, 9, 10}}};
}

std::vector<ClassGroup> unit_b_groups() { return {{4, {4}}, {5, {5}}, {6, {6}}, {7, {7}}}; }

std::vector<ClassGroup> unit_c_groups() {
    return {{1, {1}}, {2, {2}}, {8, {8}}, {9, {9}}, {10, {10}}};
}

std::optional<UnitId> downstream_unit(int class_id) {
    if (class_id >= 4 && class_id <= 7) {
        return UnitId::B;
    }
    if (class_id == 1 || class_id == 2 || (class_id >= 8 && class_id <= 10)) {
        return UnitId::C;
    }
    return std::nullopt;
}

SgfModel::SgfModel(NetworkConfig config)
    : config_(std::move(config)),
      a_(UnitId::A, config_.unit_a, unit_a_groups()),
      b_(UnitId::B, config_.unit_b, unit_b_groups()),
      c_(UnitId::C, config_.unit_c, unit_c_groups()),
      per_class_(kClassSlots) {
    config_.validate();
}

const SGFUnit& SgfModel::unit(UnitId id) const {
    switch (id) {
        case UnitId::A:
            return a_;
        case UnitId::B:
            return b_;
        case UnitId::C:
            return c_;
    }
    return a_;
}

SGFUnit& SgfModel::unit_mut(UnitId id) { return const_cast<SGFUnit&>(unit(id)); }

namespace {

/// ST-core outputs shared between units with identical core parameters.
class StCache {
public:
    explicit StCache(std::span<const events::Frame> frames) : frames_(frames) {}

    const std::vector<BinaryGrid>& get(const stcore::STCoreParams& params) {
        for (const auto& [p, grids] : entries_) {
            if (p == params) {
                return grids;
            }
        }
        entries_.emplace_back(params, stcore::st_filter(frames_, params));
        return entries_.back().second;
    }

private:
    std::span<const events::Frame> frames_;
    std::vector<std::pair<stcore::STCoreParams, std::vector<BinaryGrid>>> entries_;
};

void check_frames(std::span<const events::Frame> frames, const Geometry& geometry) {
    if (frames.empty()) {
        throw DataError("sample has no frames");
    }
    if (frames.front().magnitude.geometry() != geometry) {
        throw DataError("sample geometry does not match the network geometry");
    }
}

}  // namespace

SampleVectors SgfModel::extract(std::span<const events::Frame> frames, int class_id) const {
    check_frames(frames, config_.geometry);
    if (!a_.handles(class_id)) {
        throw Error("class " + std::to_string(class_id) + " is not handled by the network");
    }
    StCache cache(frames);
    SampleVectors out;
    out.a = a_.extract_from_st(cache.get(config_.unit_a.stcore));
    out.downstream = downstream_unit(class_id);
    if (out.downstream) {
        const SGFUnit& u = unit(*out.downstream);
        out.downstream_vector = u.extract_from_st(cache.get(u.network().stcore));
    }
    return out;
}

void SgfModel::record_knowledge(const SampleVectors& v, int class_id) {
    auto& k = per_class_[static_cast<std::size_t>(class_id)];
    ++k.trials;
    auto remember = [&](int unit, const FeatureVector& vec) {
        for (const auto& [u, seen] : k.seen) {
            if (u == unit && seen == vec) {
                return;
            }
        }
        k.seen.emplace_back(unit, vec);
    };
    remember(static_cast<int>(UnitId::A), v.a);
    if (v.downstream && v.downstream_vector) {
        remember(static_cast<int>(*v.downstream), *v.downstream_vector);
    }
    knowledge_.push_back({k.trials, class_id, k.seen.size()});
}

void SgfModel::train_vectors(const SampleVectors& vectors, int class_id) {
    if (class_id < 1 || class_id >= static_cast<int>(kClassSlots)) {
        throw Error("class id " + std::to_string(class_id) + " outside 1..10");
    }
    a_.train_sample(vectors.a, class_id);
    if (vectors.downstream && vectors.downstream_vector) {
        unit_mut(*vectors.downstream).train_sample(*vectors.downstream_vector, class_id);
    }
    finalized_ = false;
    record_knowledge(vectors, class_id);
}

void SgfModel::train_sample(std::span<const events::Frame> frames, int class_id) {
    train_vectors(extract(frames, class_id), class_id);
}

void SgfModel::finalize() {
    a_.finalize();
    b_.finalize();
    c_.finalize();
    finalized_ = true;
}

RouteResult SgfModel::route_vectors(const FeatureVector& vector_a,
                                    const std::function<FeatureVector(UnitId)>& downstream) const {
    if (!a_.trained()) {
        throw UntrainedRoute("unit A is untrained");
    }
    RouteResult r;
    r.vector_a = vector_a;
    r.path.push_back(UnitId::A);
    r.scores_a = a_.scores(vector_a, config_.similarity);
    r.group_label = argmax_label(r.scores_a);
    const ClassGroup* group = a_.group(r.group_label);
    if (group->classes.size() == 1) {
        r.class_id = group->classes.front();
        return r;
    }
    const auto next = downstream_unit(group->classes.front());
    const SGFUnit& u = unit(*next);
    r.path.push_back(*next);
    r.vector_downstream = downstream(*next);
    r.scores_downstream = u.scores(*r.vector_downstream, config_.similarity, group->classes);
    if (r.scores_downstream.empty()) {
        throw UntrainedRoute("unit " + std::string(to_string(*next)) +
                             " has no trained output neuron for the selected group");
    }
    r.class_id = argmax_label(r.scores_downstream);
    return r;
}

RouteResult SgfModel::route(std::span<const events::Frame> frames) const {
    check_frames(frames, config_.geometry);
    StCache cache(frames);
    const FeatureVector va = a_.extract_from_st(cache.get(config_.unit_a.stcore));
    return route_vectors(va, [&](UnitId id) {
        const SGFUnit& u = unit(id);
        return u.extract_from_st(cache.get(u.network().stcore));
    });
}

void SgfModel::save(std::ostream& out) const {
    out << "sgf-model " << kModelVersion << "\n";
    out << "similarity " << to_string(config_.similarity) << "\n";
    out << "geometry " << config_.geometry.width << " " << config_.geometry.height << "\n";
    out << "spikes_per_frame " << config_.spikes_per_frame << "\n";
    char weight[64];
    for (UnitId id : {UnitId::A, UnitId::B, UnitId::C}) {
        const SGFUnit& u = unit(id);
        out << "unit " << to_string(id) << " " << u.slot_count() << "\n";
        out << "slots ";
        const auto ids = u.network().slot_ids();
        for (std::size_t i = 0; i < ids.size(); ++i) {
            out << (i ? "," : "") << ids[i];
        }
        out << "\n";
        for (const auto& [label, neuron] : u.outputs()) {
            out << "label " << label << " classes ";
            const auto& classes = u.group(label)->classes;
            for (std::size_t i = 0; i < classes.size(); ++i) {
                out << (i ? "+" : "") << classes[i];
            }
            out << "\n";
            OutputNeuron copy = neuron;
            copy.finalize();
            for (std::size_t j = 0; j < copy.neurons().size(); ++j) {
                std::snprintf(weight, sizeof weight, "%.17g", copy.weights()[j]);
                out << "vector " << copy.neurons()[j].vector.to_string() << " histogram "
                    << copy.neurons()[j].histogram << " weight " << weight << "\n";
            }
        }
        out << "end\n";
    }
}

SgfModel SgfModel::load(std::istream& in, NetworkConfig config) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) -> DataError {
        return DataError("model line " + std::to_string(line_no) + ": " + what);
    };
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line[0] != '#') {
                return true;
            }
        }
        return false;
    };

    if (!next_line()) {
        throw DataError("model: empty file");
    }
    {
        std::istringstream ss(line);
        std::string magic;
        int version = 0;
        if (!(ss >> magic >> version) || magic != "sgf-model") {
            throw fail("expected header \"sgf-model <version>\"");
        }
        if (version != kModelVersion) {
            throw fail("unsupported model version " + std::to_string(version));
        }
    }

    std::optional<SgfModel> model;
    std::optional<UnitId> current;
    int current_label = 0;
    while (next_line()) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "similarity") {
            std::string s;
            ss >> s;
            auto sim = parse_similarity(s);
            if (!sim) {
                throw fail("unknown similarity \"" + s + "\"");
            }
            config.similarity = *sim;
        } else if (key == "geometry") {
            Geometry g;
            ss >> g.width >> g.height;
            if (!(g == config.geometry)) {
                throw fail("geometry does not match the configuration");
            }
        } else if (key == "spikes_per_frame") {
            std::size_t spf = 0;
            ss >> spf;
            if (spf != config.spikes_per_frame) {
                throw fail("spikes_per_frame does not match the configuration");
            }
        } else if (key == "unit") {
            if (!model) {
                model.emplace(config);
            }
            std::string name;
            std::size_t slots = 0;
            ss >> name >> slots;
            if (name == "A") {
                current = UnitId::A;
            } else if (name == "B") {
                current = UnitId::B;
            } else if (name == "C") {
                current = UnitId::C;
            } else {
                throw fail("unknown unit \"" + name + "\"");
            }
            if (slots != model->unit(*current).slot_count()) {
                throw fail("unit " + name + " slot count does not match the configuration");
            }
            current_label = 0;
        } else if (key == "slots") {
            if (!current) {
                throw fail("slots outside a unit block");
            }
            std::string list;
            ss >> list;
            std::string expected;
            const auto ids = model->unit(*current).network().slot_ids();
            for (std::size_t i = 0; i < ids.size(); ++i) {
                expected += (i ? "," : "") + ids[i];
            }
            if (list != expected) {
                throw fail("slot order does not match the configuration");
            }
        } else if (key == "label") {
            if (!current) {
                throw fail("label outside a unit block");
            }
            if (!(ss >> current_label) || model->unit(*current).group(current_label) == nullptr) {
                throw fail("unknown label");
            }
        } else if (key == "vector") {
            if (!current || current_label == 0) {
                throw fail("vector outside a label block");
            }
            std::string bits;
            std::string hist_key;
            std::uint64_t histogram = 0;
            std::string weight_key;
            double weight = 0.0;
            if (!(ss >> bits >> hist_key >> histogram) || hist_key != "histogram" || histogram == 0) {
                throw fail("expected \"vector <bits> histogram <n> weight <w>\"");
            }
            if (ss >> weight_key && (weight_key != "weight" || !(ss >> weight))) {
                throw fail("malformed weight");
            }
            try {
                model->unit_mut(*current).restore(current_label, FeatureVector::from_string(bits),
                                                  histogram);
            } catch (const Error& e) {
                throw fail(e.what());
            }
        } else if (key == "end") {
            current.reset();
            current_label = 0;
        } else {
            throw fail("unknown key \"" + key + "\"");
        }
    }
    if (!model) {
        model.emplace(config);
    }
    model->config_.similarity = config.similarity;
    model->finalize();
    return std::move(*model);
}

void online_learn(std::span<const events::EventStream> samples, SgfModel& model) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (!s.label) {
            throw DataError("training sample " + std::to_string(i) + " has no label");
        }
        const auto frames = events::bin_frames(s, model.config().spikes_per_frame);
        model.train_sample(frames, *s.label);
    }
    model.finalize();
}

std::string knowledge_csv(std::span<const KnowledgeRow> rows) {
    std::string out = "trial,class,distinct_vectors\n";
    for (const auto& r : rows) {
        out += std::to_string(r.trial) + "," + std::to_string(r.class_id) + "," +
               std::to_string(r.distinct_vectors) + "\n";
    }
    return out;
}

}  // namespace sgf
