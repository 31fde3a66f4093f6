#pragma once

#include <span>
#include <string>
#include <vector>

namespace semistatic {

enum class OptionKind { call, put };

/// One two-sided quote on a European option written on the index.
///
/// Prices are USD per option. Quantities are in contracts, exactly as they
/// appear on the quote screen; `position_bounds` converts them to options.
/// Crossed quotes (bid above ask) are representable on purpose.
struct Quote {
    std::string id;
    OptionKind kind = OptionKind::call;
    double strike = 0.0;
    int maturity = 1;  // period index in 1..T
    double bid_price = 0.0;
    double ask_price = 0.0;
    double bid_qty = 0.0;
    double ask_qty = 0.0;

    [[nodiscard]] bool crossed() const { return bid_price > ask_price; }
    [[nodiscard]] bool zero_spread() const { return bid_price == ask_price; }
};

/// Throws std::invalid_argument when the quote violates its invariants.
void validate_quote(const Quote& quote, int periods);

/// Cost of acquiring `qty` options (negative qty sells at the bid).
double acquisition_cost(const Quote& quote, double qty);

struct PositionInterval {
    double lower = 0.0;
    double upper = 0.0;
};

/// [-bid_qty * lot_size, ask_qty * lot_size], in options.
PositionInterval position_bounds(const Quote& quote, double lot_size);

struct MaturityPayoff {
    int period = 0;
    double amount = 0.0;
};

/// Payoff per option, paid at the quote's own maturity. Zero at every other
/// period, so only the maturity coordinate of `path` is read.
MaturityPayoff quoted_payoff(const Quote& quote, std::span<const double> path);

/// Perfectly liquid cash with zero interest.
struct CashAsset {
    static constexpr double unit_price = 1.0;
    static constexpr double payoff = 1.0;
};

/// The quoted derivatives available at t = 0.
struct Market {
    std::vector<Quote> quotes;
    int periods = 2;
    double lot_size = 100.0;

    void validate() const;

    /// Sorted distinct strikes of the quotes maturing at each period.
    [[nodiscard]] std::vector<std::vector<double>> strike_sets() const;
};

}  // namespace semistatic
