#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "sgf/sgf_model.hpp"
#include "support.hpp"

using namespace sgf;

namespace {

FeatureVector fv(const char* bits) { return FeatureVector::from_string(bits); }

/// Four quadrant detectors A, B, C, D on an 8x8 grid.
UnitNetwork toy_network() {
    UnitNetwork net;
    net.stcore = {0, 1, 1, 1};
    const Region quads[] = {{0, 0, 4, 4}, {4, 0, 4, 4}, {0, 4, 4, 4}, {4, 4, 4, 4}};
    const char* ids[] = {"A", "B", "C", "D"};
    for (int i = 0; i < 4; ++i) {
        net.spatial.push_back({ids[i], quads[i], 1, 2, spatial::SpatialArchetype::LocationSpecific});
    }
    return net;
}

SGFUnit toy_unit() {
    return SGFUnit(UnitId::A, toy_network(), {{1, {1}}, {2, {2}}, {3, {3}}});
}

FeatureVector random_vector(oracle::Rng& rng, std::size_t n, double p = 0.5) {
    FeatureVector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v.set(i, rng.chance(p));
    }
    return v;
}

std::map<FeatureVector, double> weight_map(const OutputNeuron& n) {
    std::map<FeatureVector, double> m;
    for (std::size_t j = 0; j < n.neurons().size(); ++j) {
        m[n.neurons()[j].vector] = n.weights()[j];
    }
    return m;
}

}  // namespace

TEST_CASE("feature vector: string form, counts and similarity") {
    const auto v = fv("0011");
    CHECK(v.size() == 4);
    CHECK(v.count() == 2);
    CHECK(v.to_string() == "0011");
    CHECK(nor_count(v, fv("0001")) == 2);
    CHECK(xnor_count(v, fv("0001")) == 3);
    CHECK_THROWS_AS(fv("01x"), DataError);
    oracle::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.range(1, 200));
        const auto a = random_vector(rng, n);
        const auto b = random_vector(rng, n);
        std::size_t nor = 0, xnor = 0;
        for (std::size_t i = 0; i < n; ++i) {
            nor += !a.test(i) && !b.test(i);
            xnor += a.test(i) == b.test(i);
        }
        CHECK(nor_count(a, b) == nor);
        CHECK(xnor_count(a, b) == xnor);
        CHECK(FeatureVector::from_string(a.to_string()) == a);
    }
}

TEST_CASE("extract: silent network gives the zero vector, A and D give [A-D]") {
    const auto unit = toy_unit();
    BinaryGrid quiet({8, 8}, 0);
    CHECK(unit.extract_from_st(std::vector<BinaryGrid>{quiet}) == fv("0000"));
    BinaryGrid g({8, 8}, 0);
    g.at(0, 0) = g.at(1, 1) = 1;  // A
    g.at(6, 6) = g.at(7, 5) = 1;  // D
    g.at(5, 1) = 1;               // B below its area gate
    CHECK(unit.extract_from_st(std::vector<BinaryGrid>{g}) == fv("1001"));
}

TEST_CASE("training: first vector has histogram 1 and weight 1") {
    OutputNeuron n(1);
    n.train(fv("1001"));
    n.finalize();
    REQUIRE(n.neurons().size() == 1);
    CHECK(n.neurons()[0].histogram == 1);
    CHECK(n.weights()[0] == 1.0);
}

TEST_CASE("training: ten trials give histograms [3,1,5,1] and weights [0.3,0.1,0.5,0.1]") {
    auto unit = toy_unit();
    const char* script[] = {"1001", "1010", "1000", "1001", "1000", "0010", "1000", "1001", "1000", "1000"};
    for (const char* s : script) {
        unit.train_sample(fv(s), 1);
    }
    unit.finalize();
    const auto& n = unit.outputs().at(1);
    REQUIRE(n.neurons().size() == 4);
    std::vector<std::uint64_t> h;
    for (const auto& g : n.neurons()) {
        h.push_back(g.histogram);
    }
    CHECK(h == std::vector<std::uint64_t>{3, 1, 5, 1});
    CHECK(n.weights() == std::vector<double>{0.3, 0.1, 0.5, 0.1});
}

TEST_CASE("training: same sample twice, equal histograms") {
    OutputNeuron n(2);
    n.train(fv("0110"));
    n.train(fv("0110"));
    n.train(fv("0001"));
    n.train(fv("0001"));
    n.finalize();
    CHECK(n.neurons().size() == 2);
    CHECK(n.neurons()[0].histogram == 2);
    CHECK(n.weights() == std::vector<double>{0.5, 0.5});
}

TEST_CASE("training: unhandled class and wrong length are rejected") {
    auto unit = toy_unit();
    CHECK_THROWS_AS(unit.train_sample(fv("0000"), 7), Error);
    CHECK_THROWS_AS(unit.train_sample(fv("000"), 1), DataError);
}

TEST_CASE("score: truth-table cases") {
    OutputNeuron zero(1);
    zero.train(fv("0000"));
    zero.finalize();
    CHECK(score(fv("0000"), zero, Similarity::Nor) == 1.0);

    OutputNeuron ones(1);
    ones.train(fv("1111"));
    ones.finalize();
    CHECK(score(fv("1111"), ones, Similarity::Nor) == 0.0);
    CHECK(score(fv("1111"), ones, Similarity::Xnor) == 1.0);

    OutputNeuron t(1);
    t.train(fv("0011"));
    t.finalize();
    CHECK(score(fv("0001"), t, Similarity::Nor) == 0.5);
    CHECK_THROWS_AS(score(fv("001"), t, Similarity::Nor), DataError);
}

TEST_CASE("score equals the bitwise oracle and stays in [0,1]") {
    oracle::Rng rng(8080);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.range(1, 80));
        OutputNeuron out(1);
        const int samples = rng.range(1, 12);
        for (int i = 0; i < samples; ++i) {
            out.train(random_vector(rng, n, 0.3));
        }
        out.finalize();
        const auto v = random_vector(rng, n, 0.3);
        std::vector<std::string> stored;
        for (const auto& g : out.neurons()) {
            stored.push_back(g.vector.to_string());
        }
        for (bool x : {false, true}) {
            const double s = score(v, out, x ? Similarity::Xnor : Similarity::Nor);
            CHECK(s == doctest::Approx(oracle::score(v.to_string(), stored, out.weights(), x)).epsilon(1e-12));
            CHECK(s >= 0.0);
            CHECK(s <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("argmax: single neuron, plain maximum and lowest-label ties") {
    CHECK(argmax_label(std::vector<ScoredLabel>{{5, 0.0}}) == 5);
    CHECK(argmax_label(std::vector<ScoredLabel>{{1, 0.7}, {2, 0.2}, {3, 0.1}}) == 1);
    CHECK(argmax_label(std::vector<ScoredLabel>{{2, 0.5}, {1, 0.5}}) == 1);
    CHECK_THROWS_AS(argmax_label(std::vector<ScoredLabel>{}), Error);
}

TEST_CASE("property: finalized weights do not depend on training order") {
    oracle::Rng rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<FeatureVector, int>> stream;
        for (int i = 0; i < 40; ++i) {
            FeatureVector v(4);
            v.set(static_cast<std::size_t>(rng.range(0, 3)));
            v.set(static_cast<std::size_t>(rng.range(0, 3)));
            stream.emplace_back(v, rng.range(1, 3));
        }
        auto a = toy_unit();
        for (const auto& [v, c] : stream) {
            a.train_sample(v, c);
        }
        a.finalize();
        for (std::size_t i = stream.size(); i > 1; --i) {
            std::swap(stream[i - 1], stream[static_cast<std::size_t>(rng.next() % i)]);
        }
        auto b = toy_unit();
        for (const auto& [v, c] : stream) {
            b.train_sample(v, c);
        }
        b.finalize();
        for (const auto& [label, neuron] : a.outputs()) {
            CHECK(weight_map(neuron) == weight_map(b.outputs().at(label)));
        }
    }
}

TEST_CASE("property: XNOR retrieves a single stored vector; NOR when popcounts agree") {
    oracle::Rng rng(95);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.range(4, 64));
        SGFUnit unit(UnitId::A, [&] {
            UnitNetwork net;
            for (std::size_t i = 0; i < n; ++i) {
                net.spatial.push_back({"S" + std::to_string(i), {0, 0, 1, 1}, 1, 1,
                                       spatial::SpatialArchetype::LocationSpecific});
            }
            return net;
        }(), {{1, {1}}, {2, {2}}, {3, {3}}});
        std::vector<FeatureVector> stored;
        const std::size_t ones = static_cast<std::size_t>(rng.range(0, static_cast<int>(n)));
        for (int c = 1; c <= 3; ++c) {
            FeatureVector v(n);
            std::size_t set = 0;
            while (set < ones) {
                const auto i = static_cast<std::size_t>(rng.next() % n);
                if (!v.test(i)) {
                    v.set(i);
                    ++set;
                }
            }
            stored.push_back(v);
            unit.train_sample(v, c);
        }
        unit.finalize();
        const int pick = rng.range(1, 3);
        const auto& t = stored[static_cast<std::size_t>(pick - 1)];
        const auto xs = unit.scores(t, Similarity::Xnor);
        CHECK(xs[static_cast<std::size_t>(pick - 1)].score == 1.0);
        const int x_best = unit.classify(t, Similarity::Xnor);
        CHECK((x_best == pick || stored[static_cast<std::size_t>(x_best - 1)] == t));
        const int n_best = unit.classify(t, Similarity::Nor);
        const auto ns = unit.scores(t, Similarity::Nor);
        CHECK(ns[static_cast<std::size_t>(n_best - 1)].score == ns[static_cast<std::size_t>(pick - 1)].score);
    }
}

TEST_CASE("groups and downstream units") {
    const auto a = unit_a_groups();
    REQUIRE(a.size() == 4);
    CHECK(a[0].classes == std::vector<int>{3});
    CHECK(a[1].classes == std::vector<int>{4, 5});
    CHECK(a[2].classes == std::vector<int>{6, 7});
    CHECK(a[3].classes == std::vector<int>{1, 2, 8, 9, 10});
    CHECK_FALSE(downstream_unit(3));
    for (int c : {4, 5, 6, 7}) {
        CHECK(downstream_unit(c) == UnitId::B);
    }
    for (int c : {1, 2, 8, 9, 10}) {
        CHECK(downstream_unit(c) == UnitId::C);
    }
    const auto net = default_network();
    CHECK(net.unit_a.slot_count() == 36);
    CHECK(net.unit_b.slot_count() == 160);
    CHECK(net.unit_c.temporal.size() == 4);
}

TEST_CASE("model: route follows the hierarchy and save/load preserves it") {
    const auto train = support::suite(3, 500);
    auto model = support::trained_model(train);
    const auto test = support::suite(1, 501);
    std::ostringstream saved;
    model.save(saved);
    std::istringstream in(saved.str());
    const auto loaded = SgfModel::load(in, default_network());
    std::ostringstream again;
    loaded.save(again);
    CHECK(again.str() == saved.str());

    for (const auto& s : test) {
        const auto frames = events::bin_frames(s);
        const auto r = model.route(frames);
        CHECK(r.path.front() == UnitId::A);
        const ClassGroup* g = model.unit(UnitId::A).group(r.group_label);
        REQUIRE(g != nullptr);
        CHECK(std::find(g->classes.begin(), g->classes.end(), r.class_id) != g->classes.end());
        if (g->classes.size() == 1) {
            CHECK(r.path.size() == 1);
        } else {
            CHECK(r.path.back() == *downstream_unit(g->classes.front()));
        }
        CHECK(loaded.route(frames).class_id == r.class_id);
    }
}

TEST_CASE("model: untrained route is reported") {
    SgfModel empty(default_network());
    const auto s = events::suite_sample(9, 1, {});
    CHECK_THROWS_AS(empty.route(events::bin_frames(s)), UntrainedRoute);

    // unit A knows group {1,2,8,9,10} but unit C has no output neuron
    SgfModel model(default_network());
    model.train_sample(events::bin_frames(s), 9);
    model.finalize();
    std::ostringstream saved;
    model.save(saved);
    std::istringstream lines(saved.str());
    std::string text, line;
    bool in_c = false;
    while (std::getline(lines, line)) {
        in_c = in_c || line.rfind("unit C", 0) == 0;
        if (in_c && (line.rfind("label", 0) == 0 || line.rfind("vector", 0) == 0)) {
            continue;
        }
        text += line + "\n";
    }
    std::istringstream in(text);
    const auto cut = SgfModel::load(in, default_network());
    CHECK_THROWS_AS(cut.route(events::bin_frames(s)), UntrainedRoute);
}

TEST_CASE("model load errors carry line numbers") {
    std::istringstream bad("sgf-model 1\nsimilarity maybe\n");
    try {
        SgfModel::load(bad, default_network());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream wrong("sgf-model 9\n");
    CHECK_THROWS_AS(SgfModel::load(wrong, default_network()), DataError);
}

TEST_CASE("knowledge report: cumulative counts per class") {
    const auto train = support::suite(6, 77);
    const auto model = support::trained_model(train);
    const auto& rows = model.knowledge_report();
    CHECK(rows.size() == train.size());
    std::map<int, std::size_t> last, trials;
    for (const auto& r : rows) {
        CHECK(r.trial == ++trials[r.class_id]);
        CHECK(r.distinct_vectors >= last[r.class_id]);
        CHECK(r.distinct_vectors <= 2 * r.trial);
        last[r.class_id] = r.distinct_vectors;
    }
    CHECK(knowledge_csv(rows).rfind("trial,class,distinct_vectors\n", 0) == 0);
}

TEST_CASE("online_learn requires labels") {
    SgfModel model(default_network());
    std::vector<events::EventStream> s{events::suite_sample(3, 1, {})};
    s[0].label.reset();
    CHECK_THROWS_AS(online_learn(s, model), DataError);
}
