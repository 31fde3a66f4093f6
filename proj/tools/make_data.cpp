// Regenerates the packaged quote files and run configurations under data/.
// Usage: make_data <data-dir>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "semistatic/instruments.hpp"
#include "semistatic/quotes_csv.hpp"
#include "semistatic/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

ordered_json base_config(const std::string& quotes) {
    ordered_json j;
    j["agent"] = {{"wealth", 100000.0}, {"risk_aversion", 2.0}};
    j["market"] = {{"quotes", quotes},
                   {"maturities", {"4/21/2017", "5/19/2017"}},
                   {"lot_size", 100.0},
                   {"truncation", {1000.0, 3000.0}}};
    j["claim"] = {{"type", "knockout"}, {"strike", 2350.0}, {"barrier", 2400.0}, {"units", 1.0}};
    j["simulation"] = {{"paths", 2000}, {"seed", 42}};
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_data <data-dir>\n";
        return 1;
    }
    try {
        const fs::path dir(argv[1]);
        const fs::path fixtures = dir / "fixtures";
        fs::create_directories(fixtures);

        semistatic::save_quotes((dir / "synthetic_chain.csv").string(), semistatic::synthetic_chain());
        semistatic::save_quotes((fixtures / "planted_parity.csv").string(), semistatic::planted_parity_chain());
        semistatic::save_quotes((fixtures / "crossed_quote.csv").string(), semistatic::crossed_quote_fixture());
        semistatic::save_quotes((fixtures / "replication.csv").string(), semistatic::replication_fixture());
        semistatic::save_quotes((fixtures / "deep_book.csv").string(), semistatic::deep_book_chain());

        write_text(dir / "base_config.json", base_config("synthetic_chain.csv").dump(2) + "\n");

        auto parity = base_config("planted_parity.csv");
        parity["market"]["delta_pct"] = 0.1;
        write_text(fixtures / "planted_parity_config.json", parity.dump(2) + "\n");

        // the single-quote fixtures keep the grid of the full chain
        semistatic::Market chain;
        chain.quotes = semistatic::synthetic_chain();

        auto crossed = base_config("crossed_quote.csv");
        crossed.erase("claim");
        crossed["grid"] = {{"strikes", chain.strike_sets()}};
        write_text(fixtures / "crossed_quote_config.json", crossed.dump(2) + "\n");

        auto replication = base_config("replication.csv");
        replication["claim"] = {{"type", "vanilla"}, {"strike", 2350.0}, {"units", 1.0}};
        replication["grid"] = {{"strikes", chain.strike_sets()}};
        write_text(fixtures / "replication_config.json", replication.dump(2) + "\n");

        auto cash_only = base_config("");
        cash_only["market"].erase("quotes");
        cash_only.erase("claim");
        cash_only["flags"] = {{"dynamic_trading", false}};
        write_text(fixtures / "cash_only_config.json", cash_only.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "make_data: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
