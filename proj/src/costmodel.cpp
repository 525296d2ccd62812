#include "sgf/costmodel.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sgf/common.hpp"

namespace sgf::cost {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw std::invalid_argument("rational with zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g ? num / g : 0;
    den_ = g ? den / g : 1;
}

Rational operator+(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator-(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator*(const Rational& a, const Rational& b) { return {a.num_ * b.num_, a.den_ * b.den_}; }

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) {
        throw std::invalid_argument("division by zero");
    }
    return {a.num_ * b.den_, a.den_ * b.num_};
}

std::string Rational::str(int decimals) const {
    if (is_integer()) {
        return std::to_string(num_);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, to_double());
    return buf;
}

namespace {

class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    Rational parse() {
        Rational v = sum();
        skip();
        if (pos_ != s_.size()) {
            throw std::invalid_argument("unexpected '" + std::string(1, s_[pos_]) + "' in expression");
        }
        return v;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Rational sum() {
        Rational v = product();
        for (;;) {
            if (eat('+')) {
                v = v + product();
            } else if (eat('-')) {
                v = v - product();
            } else {
                return v;
            }
        }
    }

    Rational product() {
        Rational v = atom();
        for (;;) {
            if (eat('*')) {
                v = v * atom();
            } else if (eat('/')) {
                v = v / atom();
            } else {
                return v;
            }
        }
    }

    Rational atom() {
        if (eat('(')) {
            Rational v = sum();
            if (!eat(')')) {
                throw std::invalid_argument("missing ')' in expression");
            }
            return v;
        }
        skip();
        std::int64_t n = 0;
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            n = n * 10 + (s_[pos_] - '0');
            ++pos_;
        }
        if (pos_ == start) {
            throw std::invalid_argument("expected a number in expression");
        }
        return Rational(n);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

constexpr double kMega = 1048576.0;

std::string mega(const Rational& v, const char* unit) {
    return fixed(v.to_double() / kMega, 2) + unit;
}

}  // namespace

Rational evaluate_expression(std::string_view expr) { return ExprParser(expr).parse(); }

LayerCost conv_cost(const ConvLayerSpec& spec) {
    if (spec.ic <= 0 || spec.oc <= 0 || spec.k <= 0 || spec.h_out <= 0 || spec.w_out <= 0) {
        throw DataError("conv layer: channel, kernel and output sizes must be positive");
    }
    const std::int64_t params = spec.ic * spec.oc * spec.k * spec.k;
    return {params, params * spec.h_out * spec.w_out};
}

std::int64_t conv_output_size(std::int64_t in, std::int64_t k, std::int64_t s, std::int64_t pad) {
    if (s <= 0 || in + 2 * pad < k) {
        throw DataError("conv layer: kernel larger than padded input or stride not positive");
    }
    return (in + 2 * pad - k) / s + 1;
}

LayerCost mlp_cost(const PatLayerSpec& spec) {
    if (spec.n <= 0 || spec.c_in <= 0 || spec.c_out <= 0) {
        throw DataError("mlp layer: sizes must be positive");
    }
    const std::int64_t params = spec.c_in * spec.c_out;
    return {params, spec.n * params};
}

std::vector<Rational> CostReport::totals() const {
    std::vector<Rational> t(value_columns.size());
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.values.size() && i < t.size(); ++i) {
            t[i] += r.values[i];
        }
    }
    return t;
}

std::vector<ConvLayerSpec> convnet_layers() {
    // ic, oc, k, s, pad, h_out, w_out
    return {
        {6, 12, 3, 2, 0, 31, 31},        {12, 252, 4, 2, 0, 14, 14},     {252, 256, 1, 1, 0, 14, 14},
        {256, 256, 2, 2, 0, 7, 7},       {256, 512, 3, 1, 1, 7, 7},      {512, 512, 1, 1, 0, 7, 7},
        {512, 512, 1, 1, 0, 7, 7},       {512, 512, 1, 1, 0, 7, 7},      {512, 512, 2, 2, 0, 3, 3},
        {512, 1024, 3, 1, 1, 3, 3},      {1024, 1024, 1, 1, 0, 3, 3},    {1024, 1024, 1, 1, 0, 3, 3},
        {1024, 1024, 2, 2, 0, 1, 1},     {1024, 1024, 1, 1, 0, 1, 1},    {1024, 968, 1, 1, 0, 1, 1},
        {968, 2640, 1, 1, 0, 1, 1},
    };
}

CostReport convnet_report() {
    CostReport r;
    r.title = "ConvNet parameters and MACs";
    r.input_columns = {"IC", "OC", "K", "S", "Pad", "H/W(out)"};
    r.value_columns = {"Parameters", "MACs"};
    r.value_decimals = {0, 0};
    std::int64_t size = kConvNetInput;
    for (const auto& l : convnet_layers()) {
        size = conv_output_size(size, l.k, l.s, l.pad);
        if (size != l.h_out) {
            throw DataError("conv layer chain: computed output " + std::to_string(size) +
                            " != listed " + std::to_string(l.h_out));
        }
        const LayerCost c = conv_cost(l);
        r.rows.push_back({{std::to_string(l.ic), std::to_string(l.oc), std::to_string(l.k),
                           std::to_string(l.s), std::to_string(l.pad), std::to_string(l.h_out)},
                          {c.params, c.macs},
                          {}});
    }
    const auto t = r.totals();
    r.scaled_totals = {mega(t[0], "M"), mega(t[1], "M")};
    return r;
}

std::vector<PatLayerSpec> pat_layers() {
    const Rational gat_params(1048576, 3);
    return {
        {PatLayerKind::Gat, 1024, 1024, 1024, LayerCost{gat_params, Rational(2147483648LL, 3)}},
        {PatLayerKind::Gat, 384, 1024, 1024, LayerCost{gat_params, Rational(184549376)}},
        {PatLayerKind::Gat, 128, 1024, 1024, LayerCost{gat_params, Rational(50331648)}},
        {PatLayerKind::Mlp, 64, 1024, 512, std::nullopt},
        {PatLayerKind::Mlp, 64, 512, 256, std::nullopt},
        {PatLayerKind::Mlp, 64, 256, 10, std::nullopt},
    };
}

CostReport pat_report() {
    CostReport r;
    r.title = "PAT parameters and MACs";
    r.input_columns = {"Layer type", "N", "c/IC", "OC"};
    r.value_columns = {"#Parameters", "#MACs"};
    r.value_decimals = {4, 1};
    for (const auto& l : pat_layers()) {
        LayerCost c;
        if (l.kind == PatLayerKind::Gat) {
            if (!l.table_cost) {
                throw DataError("GAT layer without a published cost");
            }
            c = *l.table_cost;
        } else {
            c = mlp_cost(l);
        }
        r.rows.push_back({{l.kind == PatLayerKind::Gat ? "GAT" : "MLP", std::to_string(l.n),
                           std::to_string(l.c_in), std::to_string(l.c_out)},
                          {c.params, c.macs},
                          {}});
    }
    const auto t = r.totals();
    r.scaled_totals = {mega(t[0], "M"), mega(t[1], "M")};
    return r;
}

std::vector<SgfCostEntry> sgf_size_entries() {
    return {
        {"ST core 1", "42*42*2*8/8", 1, "3528 Byte", std::nullopt},
        {"ST core 2", "128*128*2*8/8", 1, "32768 Byte", std::nullopt},
        {"A/D", "(110+2*8)/8=19", 16, "304 Byte", std::nullopt},
        {"B/C", "(110+2*8)/8=19", 18, "342 Byte", std::nullopt},
        {"G", "2*8/8", 2, "4 Byte", std::nullopt},
        {"E/F", "3*8/8", 160, "480 Byte", std::nullopt},
        {"H/I/J/K", "8/8", 2, "32 Byte", Rational(32)},
    };
}

std::vector<SgfCostEntry> sgf_ops_entries() {
    return {
        {"ST core 1", "3*3*42*42*80+42*42*80", 1, "1.35 MOPs", std::nullopt},
        {"ST core 2", "1*1*128*128*80+128*128*80", 1, "2.5 MOPs", std::nullopt},
        {"A/D", "42*42+(42*42-1)+1", 16, "56.0 KOPs", std::nullopt},
        {"B/C", "42*42+(42*42-1)+1", 18, "63.0 KOPs", std::nullopt},
        {"G", "42*42+(42*42-1)+1", 2, "7 KOPs", std::nullopt},
        {"E/F", "(30*30+30)*3*10", 160, "4.26 MOPs", std::nullopt},
        {"H/I/J/K", "(30*30+30)*3*10", 2, "54.5 KOPs", std::nullopt},
    };
}

std::string check_printed(std::string_view printed, const Rational& value) {
    std::string number;
    std::size_t i = 0;
    while (i < printed.size() && (std::isdigit(static_cast<unsigned char>(printed[i])) || printed[i] == '.')) {
        number += printed[i++];
    }
    while (i < printed.size() && printed[i] == ' ') {
        ++i;
    }
    const std::string_view unit = printed.substr(i);
    if (number.empty()) {
        throw std::invalid_argument("printed value without a number: " + std::string(printed));
    }
    double scale = 1.0;
    if (unit.starts_with("KB")) {
        scale = 1024.0;
    } else if (unit.starts_with("K")) {
        scale = 1000.0;
    } else if (unit.starts_with("M")) {
        scale = kMega;
    }
    const auto dot = number.find('.');
    const int decimals = dot == std::string::npos ? 0 : static_cast<int>(number.size() - dot - 1);
    const double tolerance = 0.5 * std::pow(10.0, -decimals) + 1e-9;
    const double shown = std::stod(number);
    const double exact = value.to_double() / scale;
    if (std::abs(exact - shown) <= tolerance) {
        return {};
    }
    std::string note = "printed " + std::string(printed) + " but the formula gives " + value.str(1);
    if (unit.starts_with("K") && !unit.starts_with("KB")) {
        note += " (" + fixed(value.to_double() / 1000.0, 3) + " K at /1000, " +
                fixed(value.to_double() / 1024.0, 3) + " K at /1024)";
    } else if (scale != 1.0) {
        note += " (" + fixed(exact, 3) + " " + std::string(unit) + ")";
    }
    return note;
}

namespace {

CostReport sgf_report(const std::vector<SgfCostEntry>& entries, const std::string& title,
                      const std::string& value_column) {
    CostReport r;
    r.title = title;
    r.input_columns = {"Layer", "Calculation", "Number", "Published"};
    r.value_columns = {value_column};
    r.value_decimals = {2};
    for (const auto& e : entries) {
        std::string expr = e.calculation;
        std::optional<Rational> stated;
        if (const auto eq = expr.find('='); eq != std::string::npos) {
            stated = evaluate_expression(expr.substr(eq + 1));
            expr = expr.substr(0, eq);
        }
        const Rational formula = evaluate_expression(expr);
        std::vector<std::string> notes;
        if (stated && !(*stated == formula)) {
            notes.push_back(expr + " evaluates to " + formula.str(2) + ", not the stated " +
                            stated->str(2) + "; " + stated->str(2) + " per sub-network is used");
        }
        const Rational per_unit = stated ? *stated : formula;
        Rational row = per_unit * Rational(e.count);
        if (e.honored && !(*e.honored == row)) {
            notes.push_back("formula x number = " + row.str(2) + ", published row value " +
                            e.honored->str(2) + " is used");
            row = *e.honored;
        }
        if (!e.printed.empty()) {
            if (auto n = check_printed(e.printed, row); !n.empty()) {
                notes.push_back(n);
            }
        }
        CostRow cr;
        cr.inputs = {e.layer, e.calculation, std::to_string(e.count), e.printed};
        cr.values = {row};
        for (std::size_t i = 0; i < notes.size(); ++i) {
            cr.discrepancy += (i ? "; " : "") + notes[i];
        }
        r.rows.push_back(std::move(cr));
    }
    return r;
}

}  // namespace

CostReport sgf_size_report(const std::vector<SgfCostEntry>& entries) {
    CostReport r = sgf_report(entries, "SGF model size", "Bytes");
    const auto t = r.totals();
    r.scaled_totals = {fixed(t[0].to_double() / 1024.0, 2) + " KB"};
    return r;
}

CostReport sgf_ops_report(const std::vector<SgfCostEntry>& entries) {
    CostReport r = sgf_report(entries, "SGF operation number", "Operations");
    const auto t = r.totals();
    r.scaled_totals = {fixed(t[0].to_double() / kMega, 3) + " MOPs"};
    return r;
}

std::string format_text(const CostReport& report) {
    std::vector<std::string> header = report.input_columns;
    header.insert(header.end(), report.value_columns.begin(), report.value_columns.end());
    std::vector<std::vector<std::string>> lines;
    for (const auto& r : report.rows) {
        std::vector<std::string> cells = r.inputs;
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            cells.push_back(r.values[i].str(report.value_decimals.at(i)));
        }
        lines.push_back(std::move(cells));
    }
    const auto totals = report.totals();
    std::vector<std::size_t> width(header.size(), 0);
    auto widen = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            width[i] = std::max(width[i], cells[i].size());
        }
    };
    std::vector<std::string> scaled(report.input_columns.size());
    scaled.back() = "Total";
    scaled.insert(scaled.end(), report.scaled_totals.begin(), report.scaled_totals.end());
    scaled.resize(header.size());
    widen(header);
    widen(scaled);
    for (const auto& l : lines) {
        widen(l);
    }

    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                line += "  ";
            }
            line += std::string(width[i] - cells[i].size(), ' ') + cells[i];
        }
        out << line << "\n";
    };
    out << report.title << "\n";
    emit(header);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        emit(lines[i]);
    }
    emit(scaled);
    bool any_note = false;
    for (const auto& r : report.rows) {
        if (!r.discrepancy.empty()) {
            if (!any_note) {
                out << "Discrepancies:\n";
                any_note = true;
            }
            out << "  " << r.inputs.front() << ": " << r.discrepancy << "\n";
        }
    }
    out << "Total:";
    for (std::size_t i = 0; i < totals.size(); ++i) {
        out << (i ? ", " : " ") << totals[i].str(report.value_decimals.at(i));
    }
    out << "\n";
    return out.str();
}

namespace {

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string format_csv(const CostReport& report) {
    std::ostringstream out;
    std::vector<std::string> header = report.input_columns;
    header.insert(header.end(), report.value_columns.begin(), report.value_columns.end());
    header.push_back("Discrepancy");
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << csv_cell(header[i]);
    }
    out << "\n";
    for (const auto& r : report.rows) {
        std::vector<std::string> cells = r.inputs;
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            cells.push_back(r.values[i].str(report.value_decimals.at(i)));
        }
        cells.push_back(r.discrepancy);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "," : "") << csv_cell(cells[i]);
        }
        out << "\n";
    }
    const auto totals = report.totals();
    std::vector<std::string> total_line(report.input_columns.size());
    total_line.back() = "Total";
    for (std::size_t i = 0; i < totals.size(); ++i) {
        total_line.push_back(totals[i].str(report.value_decimals.at(i)));
    }
    total_line.push_back("");
    for (std::size_t i = 0; i < total_line.size(); ++i) {
        out << (i ? "," : "") << csv_cell(total_line[i]);
    }
    out << "\n";
    return out.str();
}

}  // namespace sgf::cost
