#include "semistatic/claims.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace semistatic {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(fmt::format("{} must be positive", what));
    }
}

void require_two_periods(std::span<const double> path) {
    if (path.size() != 2) {
        throw std::invalid_argument(
            fmt::format("built-in claims are two-period, got a path of length {}", path.size()));
    }
}

}  // namespace

void Claim::validate() const {
    require_positive(contract_size, "contract size");
    std::visit(overloaded{
                   [](const VanillaCall& c) { require_positive(c.strike, "strike"); },
                   [](const KnockoutCall& c) {
                       require_positive(c.strike, "strike");
                       require_positive(c.barrier, "barrier");
                   },
                   [](const AsianCall& c) { require_positive(c.strike, "strike"); },
                   [](const LookbackCall& c) { require_positive(c.strike, "strike"); },
                   [](const LookbackDigital& c) {
                       require_positive(c.strike, "strike");
                       require_positive(c.level, "digital payout level");
                   },
                   [](const CustomClaim& c) {
                       if (c.table.empty()) {
                           throw std::invalid_argument("custom claim table is empty");
                       }
                   },
               },
               variant);
}

double Claim::strike() const {
    return std::visit(overloaded{
                          [](const CustomClaim&) { return 0.0; },
                          [](const auto& c) { return c.strike; },
                      },
                      variant);
}

Claim make_vanilla(double strike) { return {fmt::format("vanilla_{}", strike), VanillaCall{strike}}; }

Claim make_knockout(double strike, double barrier) {
    return {fmt::format("knockout_{}_{}", strike, barrier), KnockoutCall{strike, barrier}};
}

Claim make_asian(double strike) { return {fmt::format("asian_{}", strike), AsianCall{strike}}; }

Claim make_lookback(double strike) { return {fmt::format("lookback_{}", strike), LookbackCall{strike}}; }

Claim make_digital(double strike, double level) {
    return {fmt::format("digital_{}", strike), LookbackDigital{strike, level}};
}

std::vector<Claim> standard_claims(double strike, double barrier, double digital_level) {
    return {make_vanilla(strike), make_knockout(strike, barrier), make_asian(strike),
            make_lookback(strike), make_digital(strike, digital_level)};
}

double claim_payout(const Claim& claim, std::span<const double> path) {
    return std::visit(
        overloaded{
            [&](const VanillaCall& c) {
                require_two_periods(path);
                return std::max(path[1] - c.strike, 0.0);
            },
            [&](const KnockoutCall& c) {
                require_two_periods(path);
                return path[0] < c.barrier ? std::max(path[1] - c.strike, 0.0) : 0.0;
            },
            [&](const AsianCall& c) {
                require_two_periods(path);
                return std::max(0.5 * (path[0] + path[1]) - c.strike, 0.0);
            },
            [&](const LookbackCall& c) {
                require_two_periods(path);
                return std::max({path[0] - c.strike, path[1] - c.strike, 0.0});
            },
            [&](const LookbackDigital& c) {
                require_two_periods(path);
                return (path[0] >= c.strike || path[1] >= c.strike) ? c.level : 0.0;
            },
            [&](const CustomClaim& c) {
                const auto it = c.table.find(std::vector<double>(path.begin(), path.end()));
                if (it == c.table.end()) {
                    throw std::out_of_range("custom claim table does not cover the requested path");
                }
                return it->second;
            },
        },
        claim.variant);
}

std::vector<std::vector<Breakpoint>> claim_breakpoints(const Claim& claim, int periods) {
    std::vector<std::vector<Breakpoint>> out(static_cast<std::size_t>(std::max(periods, 0)));
    if (claim.is_custom()) {
        return out;
    }
    if (periods != 2) {
        throw std::invalid_argument("built-in claims are two-period");
    }
    std::visit(overloaded{
                   [&](const VanillaCall& c) { out[1].push_back({c.strike, BreakKind::kink}); },
                   [&](const KnockoutCall& c) {
                       out[0].push_back({c.barrier, BreakKind::jump});
                       out[1].push_back({c.strike, BreakKind::kink});
                   },
                   [&](const AsianCall& c) {
                       out[0].push_back({c.strike, BreakKind::kink});
                       out[1].push_back({c.strike, BreakKind::kink});
                   },
                   [&](const LookbackCall& c) {
                       out[0].push_back({c.strike, BreakKind::kink});
                       out[1].push_back({c.strike, BreakKind::kink});
                   },
                   [&](const LookbackDigital& c) {
                       out[0].push_back({c.strike, BreakKind::jump});
                       out[1].push_back({c.strike, BreakKind::jump});
                   },
                   [](const CustomClaim&) {},
               },
               claim.variant);
    return out;
}

Claim load_custom_claim(const std::string& csv_path, const std::string& id) {
    std::ifstream in(csv_path);
    if (!in) {
        throw std::runtime_error(fmt::format("cannot open claim table {}", csv_path));
    }
    CustomClaim table;
    std::string line;
    int line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                fields.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (line_no == 1) {
                continue;  // header
            }
            throw std::runtime_error(fmt::format("{}:{}: non-numeric field", csv_path, line_no));
        }
        if (fields.size() < 2) {
            throw std::runtime_error(fmt::format("{}:{}: need path columns and a payout", csv_path, line_no));
        }
        if (width == 0) {
            width = fields.size();
        } else if (fields.size() != width) {
            throw std::runtime_error(fmt::format("{}:{}: inconsistent column count", csv_path, line_no));
        }
        const double payout = fields.back();
        fields.pop_back();
        table.table[fields] = payout;
    }
    Claim c{id, std::move(table)};
    c.validate();
    return c;
}

}  // namespace semistatic
