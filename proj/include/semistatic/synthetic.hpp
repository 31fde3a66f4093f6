#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semistatic/instruments.hpp"

namespace semistatic {

/// Settings of the packaged stand-in option chain: Black-Scholes prices with
/// a quadratic smile in log-moneyness, zero rates, spreads and quantities of
/// desk-quote size.
struct SyntheticChainOptions {
    double spot = 2360.0;
    std::vector<std::string> maturities{"4/21/2017", "5/19/2017"};
    std::vector<double> horizons{31.0 / 365.0, 59.0 / 365.0};
    double strike_lo = 1500.0;
    double strike_hi = 2500.0;
    double strike_step = 50.0;
    bool calls = true;
    bool puts = true;
    /// Smile vol(k) = a + b k + c k^2 with k = log(K / spot).
    double vol_level = 0.125;
    double vol_slope = -0.30;
    double vol_curvature = 0.4;
    /// Full spread = spread_fixed + spread_rel * mid, then rounded outward
    /// to the tick.
    double spread_fixed = 0.8;
    double spread_rel = 0.02;
    double tick = 0.05;
    int min_qty = 10;
    int max_qty = 400;
    std::uint64_t seed = 20170321;
};

double smile_volatility(const SyntheticChainOptions& options, double strike);

/// Undiscounted Black-Scholes price with zero rates.
double black_scholes(OptionKind kind, double spot, double strike, double vol, double tau);

/// Quotes ordered by maturity, then calls before puts, then strike. Ids are
/// the tickers.
std::vector<Quote> synthetic_chain(const SyntheticChainOptions& options = {});

/// Chain with the last-maturity call at `strike` repriced so that buying it,
/// selling the put at the same strike and shorting the index earns `profit`
/// per option at zero cost of trading the index: ask = put bid + spot -
/// strike - profit, with the original spread kept below the ask.
std::vector<Quote> planted_parity_chain(double strike = 2350.0, double profit = 0.25,
                                        const SyntheticChainOptions& options = {});

/// One last-maturity call at 2500 quoted bid 10 / ask 5 (3 and 2 contracts).
std::vector<Quote> crossed_quote_fixture(const SyntheticChainOptions& options = {});

/// One last-maturity call at `strike` with bid = ask = `price` and unlimited
/// quantities.
std::vector<Quote> replication_fixture(double strike = 2350.0, double price = 52.85,
                                       const SyntheticChainOptions& options = {});

/// The synthetic chain with every available side enlarged to `quantity`
/// contracts, so that quantity limits do not bind.
std::vector<Quote> deep_book_chain(double quantity = 1e6, const SyntheticChainOptions& options = {});

}  // namespace semistatic
