#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "semistatic/instruments.hpp"

namespace semistatic {

/// Calendar date written as M/D/YYYY; leading zeros are accepted on input.
struct QuoteDate {
    int month = 0;
    int day = 0;
    int year = 0;

    bool operator==(const QuoteDate&) const = default;
    [[nodiscard]] std::string str() const;
};

QuoteDate parse_date(const std::string& text);

struct Ticker {
    QuoteDate maturity;
    OptionKind kind = OptionKind::call;
    double strike = 0.0;
};

/// Parses `SPX US <M/D/YYYY> <C|P><strike> Index`. Throws
/// std::invalid_argument naming the offending token.
Ticker parse_ticker(const std::string& text);

std::string format_ticker(const Ticker& ticker);

/// Shortest text that reads back to the same double.
std::string format_number(double value);

class QuoteParseError : public std::runtime_error {
public:
    QuoteParseError(std::size_t line, const std::string& message);
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Reads rows `ticker,type,bid_qty,bid_price,ask_price,ask_qty` (quantities in
/// contracts) after a header line. Maturity dates map to periods by their
/// position in `maturities` (first date is period 1).
std::vector<Quote> parse_quotes(std::istream& in, const std::vector<std::string>& maturities);

std::vector<Quote> ingest_quotes(const std::string& path, const std::vector<std::string>& maturities);

/// Inverse of parse_quotes for quotes whose id is their ticker.
void write_quotes(std::ostream& out, const std::vector<Quote>& quotes);

void save_quotes(const std::string& path, const std::vector<Quote>& quotes);

}  // namespace semistatic
