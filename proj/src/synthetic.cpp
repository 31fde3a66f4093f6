#include "semistatic/synthetic.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/random/uniform_int_distribution.hpp>

#include "semistatic/quotes_csv.hpp"

namespace semistatic {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Round to cents so that tick multiples print exactly.
double cents(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

double smile_volatility(const SyntheticChainOptions& options, double strike) {
    const double k = std::log(strike / options.spot);
    return options.vol_level + options.vol_slope * k + options.vol_curvature * k * k;
}

double black_scholes(OptionKind kind, double spot, double strike, double vol, double tau) {
    if (!(vol > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("volatility and maturity must be positive");
    }
    const double sd = vol * std::sqrt(tau);
    const double d1 = (std::log(spot / strike) + 0.5 * sd * sd) / sd;
    const double d2 = d1 - sd;
    const double call = spot * normal_cdf(d1) - strike * normal_cdf(d2);
    return kind == OptionKind::call ? call : call - spot + strike;
}

std::vector<Quote> synthetic_chain(const SyntheticChainOptions& options) {
    if (options.maturities.size() != options.horizons.size()) {
        throw std::invalid_argument("one horizon per maturity date is required");
    }
    if (!(options.strike_step > 0.0) || options.strike_hi < options.strike_lo) {
        throw std::invalid_argument("bad strike range");
    }
    std::mt19937_64 rng(options.seed);
    boost::random::uniform_int_distribution<int> qty(options.min_qty, options.max_qty);
    std::vector<Quote> out;
    const auto count = static_cast<int>(std::floor((options.strike_hi - options.strike_lo) / options.strike_step + 0.5));
    for (std::size_t m = 0; m < options.maturities.size(); ++m) {
        const QuoteDate date = parse_date(options.maturities[m]);
        for (OptionKind kind : {OptionKind::call, OptionKind::put}) {
            if ((kind == OptionKind::call && !options.calls) || (kind == OptionKind::put && !options.puts)) {
                continue;
            }
            for (int i = 0; i <= count; ++i) {
                const double strike = options.strike_lo + i * options.strike_step;
                const double mid = black_scholes(kind, options.spot, strike, smile_volatility(options, strike),
                                                 options.horizons[m]);
                const double half = 0.5 * (options.spread_fixed + options.spread_rel * mid);
                Quote q;
                q.kind = kind;
                q.strike = strike;
                q.maturity = static_cast<int>(m) + 1;
                q.id = format_ticker({date, kind, strike});
                q.bid_price = std::max(0.0, cents(std::floor((mid - half) / options.tick) * options.tick));
                q.ask_price = cents(std::ceil((mid + half) / options.tick) * options.tick);
                q.bid_qty = qty(rng);
                q.ask_qty = qty(rng);
                if (q.bid_price == 0.0) {
                    q.bid_qty = 0.0;
                }
                out.push_back(std::move(q));
            }
        }
    }
    return out;
}

namespace {

Quote last_call(const SyntheticChainOptions& options, double strike) {
    Quote q;
    q.kind = OptionKind::call;
    q.strike = strike;
    q.maturity = static_cast<int>(options.maturities.size());
    q.id = format_ticker({parse_date(options.maturities.back()), OptionKind::call, strike});
    return q;
}

}  // namespace

std::vector<Quote> planted_parity_chain(double strike, double profit, const SyntheticChainOptions& options) {
    auto quotes = synthetic_chain(options);
    const int last = static_cast<int>(options.maturities.size());
    auto find = [&](OptionKind kind) -> Quote& {
        for (auto& q : quotes) {
            if (q.kind == kind && q.strike == strike && q.maturity == last) {
                return q;
            }
        }
        throw std::invalid_argument("strike is not in the chain");
    };
    Quote& call = find(OptionKind::call);
    const Quote& put = find(OptionKind::put);
    const double spread = call.ask_price - call.bid_price;
    call.ask_price = cents(put.bid_price + options.spot - strike - profit);
    call.bid_price = cents(call.ask_price - spread);
    return quotes;
}

std::vector<Quote> crossed_quote_fixture(const SyntheticChainOptions& options) {
    Quote q = last_call(options, 2500.0);
    q.bid_price = 10.0;
    q.ask_price = 5.0;
    q.bid_qty = 3.0;
    q.ask_qty = 2.0;
    return {q};
}

std::vector<Quote> replication_fixture(double strike, double price, const SyntheticChainOptions& options) {
    Quote q = last_call(options, strike);
    q.bid_price = price;
    q.ask_price = price;
    q.bid_qty = std::numeric_limits<double>::infinity();
    q.ask_qty = std::numeric_limits<double>::infinity();
    return {q};
}

std::vector<Quote> deep_book_chain(double quantity, const SyntheticChainOptions& options) {
    auto quotes = synthetic_chain(options);
    for (auto& q : quotes) {
        if (q.bid_qty > 0.0) {
            q.bid_qty = quantity;
        }
        q.ask_qty = quantity;
    }
    return quotes;
}

}  // namespace semistatic
