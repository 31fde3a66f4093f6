#include "semistatic/instruments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace semistatic {

void validate_quote(const Quote& quote, int periods) {
    if (!(quote.strike > 0.0) || !std::isfinite(quote.strike)) {
        throw std::invalid_argument(fmt::format("quote {}: strike must be positive", quote.id));
    }
    if (quote.maturity < 1 || quote.maturity > periods) {
        throw std::invalid_argument(
            fmt::format("quote {}: maturity {} outside 1..{}", quote.id, quote.maturity, periods));
    }
    if (!(quote.bid_qty >= 0.0) || !(quote.ask_qty >= 0.0)) {
        throw std::invalid_argument(fmt::format("quote {}: quantities must be nonnegative", quote.id));
    }
    if (!std::isfinite(quote.bid_price) || !std::isfinite(quote.ask_price)) {
        throw std::invalid_argument(fmt::format("quote {}: prices must be finite", quote.id));
    }
}

double acquisition_cost(const Quote& quote, double qty) {
    if (qty >= 0.0) {
        return quote.ask_price * qty;
    }
    return quote.bid_price * qty;
}

PositionInterval position_bounds(const Quote& quote, double lot_size) {
    if (!(lot_size > 0.0)) {
        throw std::invalid_argument("lot size must be positive");
    }
    return {-quote.bid_qty * lot_size, quote.ask_qty * lot_size};
}

MaturityPayoff quoted_payoff(const Quote& quote, std::span<const double> path) {
    if (quote.maturity < 1 || static_cast<std::size_t>(quote.maturity) > path.size()) {
        throw std::invalid_argument(fmt::format("quote {}: path too short for maturity {}", quote.id,
                                                quote.maturity));
    }
    const double x = path[static_cast<std::size_t>(quote.maturity - 1)];
    const double amount = quote.kind == OptionKind::call ? std::max(x - quote.strike, 0.0)
                                                         : std::max(quote.strike - x, 0.0);
    return {quote.maturity, amount};
}

void Market::validate() const {
    if (periods < 1) {
        throw std::invalid_argument("market needs at least one period");
    }
    if (!(lot_size > 0.0)) {
        throw std::invalid_argument("lot size must be positive");
    }
    for (const auto& q : quotes) {
        validate_quote(q, periods);
    }
}

std::vector<std::vector<double>> Market::strike_sets() const {
    std::vector<std::vector<double>> sets(static_cast<std::size_t>(periods));
    for (const auto& q : quotes) {
        sets[static_cast<std::size_t>(q.maturity - 1)].push_back(q.strike);
    }
    for (auto& s : sets) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return sets;
}

}  // namespace semistatic
