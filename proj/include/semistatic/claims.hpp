#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace semistatic {

struct VanillaCall {
    double strike = 0.0;
};

/// Pays (X2 - K)+ unless X1 >= B.
struct KnockoutCall {
    double strike = 0.0;
    double barrier = 0.0;
};

struct AsianCall {
    double strike = 0.0;
};

struct LookbackCall {
    double strike = 0.0;
};

/// Pays `level` when any monitored level reaches K.
struct LookbackDigital {
    double strike = 0.0;
    double level = 10.0;
};

/// Payout table keyed by path. Lookup is exact on the coordinates, so the
/// table has to be aligned with the grid it is evaluated on.
struct CustomClaim {
    std::map<std::vector<double>, double> table;
};

using ClaimVariant =
    std::variant<VanillaCall, KnockoutCall, AsianCall, LookbackCall, LookbackDigital, CustomClaim>;

struct Claim {
    std::string id;
    ClaimVariant variant;
    double contract_size = 100.0;

    void validate() const;
    [[nodiscard]] bool is_custom() const { return std::holds_alternative<CustomClaim>(variant); }
    /// Strike of the built-in variants; 0 for custom claims.
    [[nodiscard]] double strike() const;
};

Claim make_vanilla(double strike);
Claim make_knockout(double strike, double barrier);
Claim make_asian(double strike);
Claim make_lookback(double strike);
Claim make_digital(double strike, double level = 10.0);

/// The five claims priced in the reference experiments, sharing strike K and
/// barrier B: vanilla, knockout, asian, lookback, digital.
std::vector<Claim> standard_claims(double strike, double barrier, double digital_level = 10.0);

/// Per option; callers apply contract_size. Built-in variants need a
/// two-period path.
double claim_payout(const Claim& claim, std::span<const double> path);

enum class BreakKind { kink, jump };

struct Breakpoint {
    double level = 0.0;
    BreakKind kind = BreakKind::kink;

    bool operator==(const Breakpoint&) const = default;
};

/// Per-period sorted breakpoints (index 0 is period 1). Custom claims have
/// none.
std::vector<std::vector<Breakpoint>> claim_breakpoints(const Claim& claim, int periods = 2);

Claim load_custom_claim(const std::string& csv_path, const std::string& id);

}  // namespace semistatic
