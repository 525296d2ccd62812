#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "sgf/costmodel.hpp"

using namespace sgf::cost;

namespace {

bool has_note(const CostReport& r, const std::string& layer) {
    for (const auto& row : r.rows) {
        if (row.inputs.front() == layer) {
            return !row.discrepancy.empty();
        }
    }
    return false;
}

std::vector<std::int64_t> integer_column(const CostReport& r, std::size_t col) {
    std::vector<std::int64_t> out;
    for (const auto& row : r.rows) {
        REQUIRE(row.values[col].is_integer());
        out.push_back(row.values[col].num());
    }
    return out;
}

}  // namespace

TEST_CASE("rational arithmetic is exact and reduced") {
    const Rational third(1, 3);
    CHECK(third + third + third == Rational(1));
    CHECK(Rational(6, 4) == Rational(3, 2));
    CHECK(Rational(2147483648, 3).str(1) == "715827882.7");
    CHECK(Rational(5).str() == "5");
    CHECK((Rational(7, 2) - Rational(1, 2)) == Rational(3));
    CHECK((Rational(2, 3) / Rational(4, 9)) == Rational(3, 2));
}

TEST_CASE("expression evaluation") {
    CHECK(evaluate_expression("42*42*2*8/8") == Rational(3528));
    CHECK(evaluate_expression("(110+2*8)/8") == Rational(63, 4));
    CHECK(evaluate_expression("42*42+(42*42-1)+1") == Rational(3528));
    CHECK_THROWS_AS(evaluate_expression("1+"), std::invalid_argument);
    CHECK_THROWS_AS(evaluate_expression("1/0"), std::invalid_argument);
}

TEST_CASE("conv_cost examples") {
    auto c = conv_cost({6, 12, 3, 2, 0, 31, 31});
    CHECK(c.params == Rational(648));
    CHECK(c.macs == Rational(622728));
    c = conv_cost({12, 252, 4, 2, 0, 14, 14});
    CHECK(c.params == Rational(48384));
    CHECK(c.macs == Rational(9483264));
    c = conv_cost({1, 1, 1, 1, 0, 1, 1});
    CHECK(c.params == Rational(1));
    CHECK(c.macs == Rational(1));
}

TEST_CASE("property: conv_cost against its formula") {
    oracle::Rng rng(10);
    for (int trial = 0; trial < 500; ++trial) {
        const ConvLayerSpec s{rng.range(1, 64), rng.range(1, 64), rng.range(1, 7), 1, 0, rng.range(1, 40),
                              rng.range(1, 40)};
        const auto c = conv_cost(s);
        CHECK(c.params == Rational(s.ic * s.oc * s.k * s.k));
        CHECK(c.macs == Rational(s.ic * s.oc * s.k * s.k * s.h_out * s.w_out));
        ConvLayerSpec k1 = s;
        k1.k = 1;
        CHECK(conv_cost(k1).params == Rational(s.ic * s.oc));
        ConvLayerSpec twice = s;
        twice.h_out *= 2;
        CHECK(conv_cost(twice).macs == c.macs * Rational(2));
    }
}

TEST_CASE("convnet report: 16 rows, exact totals, consistent output sizes") {
    const auto r = convnet_report();
    REQUIRE(r.rows.size() == 16);
    const auto t = r.totals();
    CHECK(t[0] == Rational(18995720));
    CHECK(t[1] == Rational(211501832));
    std::int64_t in = kConvNetInput;
    for (const auto& l : convnet_layers()) {
        CHECK(conv_output_size(in, l.k, l.s, l.pad) == l.h_out);
        in = l.h_out;
    }
    const std::string text = format_text(r);
    CHECK(text.ends_with("Total: 18995720, 211501832\n"));
}

TEST_CASE("mlp_cost examples") {
    auto c = mlp_cost({PatLayerKind::Mlp, 64, 1024, 512, {}});
    CHECK(c.params == Rational(524288));
    CHECK(c.macs == Rational(33554432));
    c = mlp_cost({PatLayerKind::Mlp, 64, 256, 10, {}});
    CHECK(c.params == Rational(2560));
    CHECK(c.macs == Rational(163840));
    c = mlp_cost({PatLayerKind::Mlp, 1, 1, 1, {}});
    CHECK(c.params == Rational(1));
}

TEST_CASE("pat report totals") {
    const auto t = pat_report().totals();
    CHECK(t[0] == Rational(1706496));
    CHECK(std::abs(t[1].to_double() - 992815786.7) <= 0.05);
}

TEST_CASE("sgf size report") {
    const auto r = sgf_size_report();
    CHECK(integer_column(r, 0) == std::vector<std::int64_t>{3528, 32768, 304, 342, 4, 480, 32});
    CHECK(r.totals()[0] == Rational(37458));
    CHECK(std::find(r.scaled_totals.begin(), r.scaled_totals.end(), "36.58 KB") != r.scaled_totals.end());
    CHECK(has_note(r, "A/D"));
    CHECK(has_note(r, "B/C"));
    CHECK(sgf_size_report({}).totals()[0] == Rational(0));
}

TEST_CASE("sgf ops report") {
    const auto r = sgf_ops_report();
    const auto ops = integer_column(r, 0);
    CHECK(ops[0] == 1411200);
    CHECK(ops[1] == 2621440);
    CHECK(ops[2] == 56448);
    CHECK(ops[3] == 63504);
    CHECK(ops[5] == 4464000);
    CHECK(r.totals()[0] == Rational(8679448));
    const double mops = r.totals()[0].to_double() / 1048576.0;
    CHECK(std::abs(mops - 8.27) / 8.27 < 0.005);
    CHECK(has_note(r, "A/D"));
    CHECK(has_note(r, "H/I/J/K"));
    CHECK_FALSE(has_note(r, "ST core 2"));
    CHECK_FALSE(has_note(r, "E/F"));
}

TEST_CASE("property: totals do not depend on row order") {
    oracle::Rng rng(4);
    auto entries = sgf_ops_entries();
    const auto total = sgf_ops_report(entries).totals();
    for (int trial = 0; trial < 20; ++trial) {
        for (std::size_t i = entries.size(); i > 1; --i) {
            std::swap(entries[i - 1], entries[static_cast<std::size_t>(rng.next() % i)]);
        }
        CHECK(sgf_ops_report(entries).totals() == total);
    }
}

TEST_CASE("check_printed reads units and printed precision") {
    CHECK(check_printed("2.5 MOPs", Rational(2621440)).empty());
    CHECK(check_printed("63.0 KOPs", Rational(63504)).size() > 0);
    CHECK(check_printed("304 Byte", Rational(304)).empty());
    CHECK(check_printed("36.58 KB", Rational(37458)).empty());
    CHECK(check_printed("7 KOPs", Rational(7056)).empty());
    CHECK_FALSE(check_printed("305 Byte", Rational(304)).empty());
}

TEST_CASE("csv output has one line per row plus header and total") {
    const auto r = convnet_report();
    const std::string csv = format_csv(r);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 18);
    CHECK(csv.rfind("IC,OC,K,S,Pad,H/W(out),Parameters,MACs,Discrepancy\n", 0) == 0);
}
