#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgf::cost {

/// Exact non-negative fraction; always stored reduced.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_integer() const { return den_ == 1; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    friend bool operator==(const Rational&, const Rational&) = default;

    /// Integers print exactly; fractions with `decimals` digits.
    std::string str(int decimals = 4) const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Evaluates an integer expression with + - * / and parentheses exactly.
/// Throws std::invalid_argument on malformed input or division by zero.
Rational evaluate_expression(std::string_view expr);

struct LayerCost {
    Rational params;
    Rational macs;
};

struct ConvLayerSpec {
    std::int64_t ic = 0;
    std::int64_t oc = 0;
    std::int64_t k = 0;
    std::int64_t s = 1;
    std::int64_t pad = 0;
    std::int64_t h_out = 0;
    std::int64_t w_out = 0;
};

/// params = ic*oc*k^2, macs = params*h_out*w_out.
LayerCost conv_cost(const ConvLayerSpec& spec);
/// floor((in + 2*pad - k) / s) + 1.
std::int64_t conv_output_size(std::int64_t in, std::int64_t k, std::int64_t s, std::int64_t pad);

enum class PatLayerKind { Gat, Mlp };

struct PatLayerSpec {
    PatLayerKind kind = PatLayerKind::Mlp;
    std::int64_t n = 0;
    std::int64_t c_in = 0;
    std::int64_t c_out = 0;
    /// GAT rows carry their published costs; there is no closed form for them.
    std::optional<LayerCost> table_cost;
};

/// params = c_in*c_out, macs = n*params.
LayerCost mlp_cost(const PatLayerSpec& spec);

/// One table row: descriptive columns, exact quantities and an optional
/// note where the published value disagrees with its own formula.
struct CostRow {
    std::vector<std::string> inputs;
    std::vector<Rational> values;
    std::string discrepancy;
};

struct CostReport {
    std::string title;
    std::vector<std::string> input_columns;
    std::vector<std::string> value_columns;
    std::vector<int> value_decimals;  // digits for non-integer values, per column
    std::vector<CostRow> rows;
    /// Human-scale totals such as "36.58 KB".
    std::vector<std::string> scaled_totals;

    std::vector<Rational> totals() const;
};

std::vector<ConvLayerSpec> convnet_layers();
/// Input height/width of the first ConvNet layer, used to check the chain of
/// output sizes.
constexpr std::int64_t kConvNetInput = 64;
CostReport convnet_report();

std::vector<PatLayerSpec> pat_layers();
CostReport pat_report();

/// One row of the SGF size or operation table.
struct SgfCostEntry {
    std::string layer;
    /// Per-sub-network expression, optionally followed by "=<stated value>".
    std::string calculation;
    std::int64_t count = 1;
    /// Published row value with its unit ("304 Byte", "56.0 KOPs").
    std::string printed;
    /// Row value used instead of formula*count when the published total
    /// depends on it.
    std::optional<Rational> honored;
};

std::vector<SgfCostEntry> sgf_size_entries();
std::vector<SgfCostEntry> sgf_ops_entries();

/// Bytes per row; total in KB at /1024.
CostReport sgf_size_report(const std::vector<SgfCostEntry>& entries = sgf_size_entries());
/// Operations per row; total in MOPs at /2^20.
CostReport sgf_ops_report(const std::vector<SgfCostEntry>& entries = sgf_ops_entries());

/// Checks a published value such as "56.0 KOPs" against an exact count.
/// K/M prefixes are read as 1000 and 2^20 respectively; a value matches when
/// it is within half a unit of its last printed digit. Returns an empty
/// string when consistent, otherwise a description of the mismatch.
std::string check_printed(std::string_view printed, const Rational& value);

std::string format_text(const CostReport& report);
std::string format_csv(const CostReport& report);

}  // namespace sgf::cost
