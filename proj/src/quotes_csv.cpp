#include "semistatic/quotes_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace semistatic {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_int(const std::string& s, int& out) {
    if (s.empty()) {
        return false;
    }
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, out);
    return res.ec == std::errc() && res.ptr == end;
}

bool parse_double(const std::string& s, double& out, bool allow_inf = false) {
    if (s.empty()) {
        return false;
    }
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, out);
    return res.ec == std::errc() && res.ptr == end && !std::isnan(out) && (allow_inf || std::isfinite(out));
}

}  // namespace

std::string QuoteDate::str() const { return fmt::format("{}/{}/{}", month, day, year); }

QuoteDate parse_date(const std::string& text) {
    const auto parts = split(text, '/');
    QuoteDate d;
    if (parts.size() != 3 || !parse_int(parts[0], d.month) || !parse_int(parts[1], d.day) ||
        !parse_int(parts[2], d.year) || d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31 || d.year < 1000) {
        throw std::invalid_argument(fmt::format("bad date '{}'", text));
    }
    return d;
}

Ticker parse_ticker(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> tokens;
    for (std::string tok; in >> tok;) {
        tokens.push_back(tok);
    }
    if (tokens.size() != 5) {
        throw std::invalid_argument(fmt::format("ticker '{}' must have 5 tokens", text));
    }
    if (tokens[0] != "SPX") {
        throw std::invalid_argument(fmt::format("ticker '{}': unexpected token '{}'", text, tokens[0]));
    }
    if (tokens[1] != "US") {
        throw std::invalid_argument(fmt::format("ticker '{}': unexpected token '{}'", text, tokens[1]));
    }
    if (tokens[4] != "Index") {
        throw std::invalid_argument(fmt::format("ticker '{}': unexpected token '{}'", text, tokens[4]));
    }
    Ticker t;
    try {
        t.maturity = parse_date(tokens[2]);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument(fmt::format("ticker '{}': bad maturity token '{}'", text, tokens[2]));
    }
    const std::string& opt = tokens[3];
    if (opt.size() < 2 || (opt[0] != 'C' && opt[0] != 'P')) {
        throw std::invalid_argument(fmt::format("ticker '{}': bad option token '{}'", text, opt));
    }
    t.kind = opt[0] == 'C' ? OptionKind::call : OptionKind::put;
    if (!parse_double(opt.substr(1), t.strike) || !(t.strike > 0.0)) {
        throw std::invalid_argument(fmt::format("ticker '{}': bad option token '{}'", text, opt));
    }
    return t;
}

std::string format_number(double value) { return fmt::format("{}", value); }

std::string format_ticker(const Ticker& ticker) {
    return fmt::format("SPX US {} {}{} Index", ticker.maturity.str(), ticker.kind == OptionKind::call ? 'C' : 'P',
                       format_number(ticker.strike));
}

QuoteParseError::QuoteParseError(std::size_t line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

std::vector<Quote> parse_quotes(std::istream& in, const std::vector<std::string>& maturities) {
    std::vector<QuoteDate> dates;
    for (const auto& m : maturities) {
        dates.push_back(parse_date(m));
    }
    std::vector<Quote> quotes;
    std::string line;
    std::size_t lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (header) {
            header = false;
            if (line.rfind("ticker", 0) == 0) {
                continue;
            }
        }
        const auto f = split(line, ',');
        if (f.size() != 6) {
            throw QuoteParseError(lineno, fmt::format("expected 6 fields, got {}", f.size()));
        }
        Ticker t;
        try {
            t = parse_ticker(trim(f[0]));
        } catch (const std::invalid_argument& e) {
            throw QuoteParseError(lineno, e.what());
        }
        const std::string type = trim(f[1]);
        if ((type != "Call" && type != "Put") || (type == "Call") != (t.kind == OptionKind::call)) {
            throw QuoteParseError(lineno, fmt::format("type '{}' does not match ticker", type));
        }
        Quote q;
        q.id = trim(f[0]);
        q.kind = t.kind;
        q.strike = t.strike;
        const char* names[] = {"bid_qty", "bid_price", "ask_price", "ask_qty"};
        double* targets[] = {&q.bid_qty, &q.bid_price, &q.ask_price, &q.ask_qty};
        for (int k = 0; k < 4; ++k) {
            const std::string v = trim(f[static_cast<std::size_t>(k + 2)]);
            // quantities may be "inf" for unlimited liquidity
            if (!parse_double(v, *targets[k], k == 0 || k == 3)) {
                throw QuoteParseError(lineno, fmt::format("{} '{}' is not a number", names[k], v));
            }
        }
        const auto it = std::find(dates.begin(), dates.end(), t.maturity);
        if (it == dates.end()) {
            throw QuoteParseError(lineno, fmt::format("unknown maturity {}", t.maturity.str()));
        }
        q.maturity = static_cast<int>(it - dates.begin()) + 1;
        try {
            validate_quote(q, static_cast<int>(dates.size()));
        } catch (const std::invalid_argument& e) {
            throw QuoteParseError(lineno, e.what());
        }
        quotes.push_back(std::move(q));
    }
    return quotes;
}

std::vector<Quote> ingest_quotes(const std::string& path, const std::vector<std::string>& maturities) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot read quotes from {}", path));
    }
    return parse_quotes(in, maturities);
}

void write_quotes(std::ostream& out, const std::vector<Quote>& quotes) {
    out << "ticker,type,bid_qty,bid_price,ask_price,ask_qty\n";
    for (const auto& q : quotes) {
        out << fmt::format("{},{},{},{},{},{}\n", q.id, q.kind == OptionKind::call ? "Call" : "Put",
                           format_number(q.bid_qty), format_number(q.bid_price), format_number(q.ask_price),
                           format_number(q.ask_qty));
    }
}

void save_quotes(const std::string& path, const std::vector<Quote>& quotes) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write {}", path));
    }
    write_quotes(out, quotes);
}

}  // namespace semistatic
