#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "defcon/metrics.hpp"
#include "defcon/valuation.hpp"

namespace defcon {

inline const std::array<CreditCategory, 4>& all_categories() {
    static const std::array<CreditCategory, 4> c = {CreditCategory::Intercept,
                                                    CreditCategory::Disturb, CreditCategory::Deter,
                                                    CreditCategory::Concede};
    return c;
}

// --- player summaries ---------------------------------------------------------

struct PlayerCreditSummary {
    std::string player_id;
    double minutes = 0.0;
    std::array<double, 4> raw{};    // by category, all_categories() order
    std::array<double, 4> per90{};
    double net_raw = 0.0;
    double net_per90 = 0.0;
};

// Raw per-match fold: category totals per player plus minutes played.
struct MatchAggregate {
    std::map<std::string, std::array<double, 4>> credit;
    std::map<std::string, double> minutes;
};

inline MatchAggregate aggregate_match(const MatchValuation& v, const MatchData& match) {
    MatchAggregate out;
    double duration_min = 0.0;
    if (!match.snapshots.empty())
        duration_min = (match.snapshots.back().time - match.snapshots.front().time) / 60.0;
    for (const auto& p : match.players) out.minutes[p.player_id] = duration_min;
    for (const auto& a : v.allocations) {
        if (!out.minutes.count(a.player_id))
            throw std::runtime_error("aggregate_match: allocation references unknown player " +
                                     a.player_id);
        out.credit[a.player_id][static_cast<int>(a.category)] += a.credit;
    }
    return out;
}

// Merge of match folds, then per-90 normalization; players under the minutes
// threshold are dropped.
inline std::vector<PlayerCreditSummary> summarize_players(
    const std::vector<MatchAggregate>& matches, double minutes_threshold = 900.0) {
    std::map<std::string, PlayerCreditSummary> by_player;
    for (const auto& m : matches) {
        for (const auto& [id, minutes] : m.minutes) {
            auto& s = by_player[id];
            s.player_id = id;
            s.minutes += minutes;
        }
        for (const auto& [id, cats] : m.credit) {
            auto& s = by_player[id];
            for (int c = 0; c < 4; ++c) s.raw[c] += cats[c];
        }
    }
    std::vector<PlayerCreditSummary> out;
    for (auto& [id, s] : by_player) {
        if (s.minutes < minutes_threshold || s.minutes <= 0.0) continue;
        for (int c = 0; c < 4; ++c) {
            s.per90[c] = s.raw[c] * 90.0 / s.minutes;
            s.net_raw += s.raw[c];
            s.net_per90 += s.per90[c];
        }
        out.push_back(s);
    }
    return out;
}

inline void write_summary_csv(const std::string& path,
                              const std::vector<PlayerCreditSummary>& summaries) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write summary: " + path);
    out.precision(17);
    out << "player_id,minutes,intercept_per90,disturb_per90,deter_per90,concede_per90,net_per90\n";
    for (const auto& s : summaries) {
        out << s.player_id << "," << s.minutes;
        for (int c = 0; c < 4; ++c) out << "," << s.per90[c];
        out << "," << s.net_per90 << "\n";
    }
}

// --- pairwise defender-attacker matrices ---------------------------------------

// Attacker attribution: the acting player of the valued event. Positive
// allocations land in `credit`, negative in `penalty`.
struct PairMatrix {
    std::map<std::string, std::map<std::string, double>> credit;   // defender -> attacker
    std::map<std::string, std::map<std::string, double>> penalty;
};

inline PairMatrix pairwise_matrix(const MatchValuation& v) {
    std::map<std::int64_t, const ValuedAction*> by_index;
    for (const auto& a : v.actions) by_index[a.action_index] = &a;
    PairMatrix out;
    for (const auto& alloc : v.allocations) {
        auto it = by_index.find(alloc.action_index);
        if (it == by_index.end())
            throw std::runtime_error("pairwise_matrix: allocation without a valued action");
        const std::string& attacker = it->second->attacker_id;
        auto& m = alloc.credit >= 0.0 ? out.credit : out.penalty;
        m[alloc.player_id][attacker] += alloc.credit;
    }
    return out;
}

inline void merge_into(PairMatrix& into, const PairMatrix& from) {
    for (const auto& [d, row] : from.credit)
        for (const auto& [a, c] : row) into.credit[d][a] += c;
    for (const auto& [d, row] : from.penalty)
        for (const auto& [a, c] : row) into.penalty[d][a] += c;
}

inline void write_pair_csv(const std::string& path,
                           const std::map<std::string, std::map<std::string, double>>& matrix) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write pair matrix: " + path);
    out.precision(17);
    out << "defender_id,attacker_id,credit\n";
    for (const auto& [d, row] : matrix)
        for (const auto& [a, c] : row) out << d << "," << a << "," << c << "\n";
}

// --- zone heatmaps --------------------------------------------------------------

// Per defending team, per category, credit binned by the valued action's raw
// ball location. Out-of-bounds locations clamp to the boundary cells.
struct ZoneGrid {
    int nx = 12, ny = 8;
    double cell_w = 105.0 / 12.0, cell_h = 68.0 / 8.0;
    // team -> category -> row-major ny x nx grid
    std::map<std::string, std::array<std::vector<double>, 4>> cells;

    std::vector<double>& grid(const std::string& team, CreditCategory cat) {
        auto& arr = cells[team];
        for (auto& g : arr)
            if (g.empty()) g.assign(static_cast<std::size_t>(nx) * ny, 0.0);
        return arr[static_cast<int>(cat)];
    }
};

inline ZoneGrid zone_heatmap(const MatchValuation& v, const MatchData& match, int nx = 12,
                             int ny = 8) {
    ZoneGrid out;
    out.nx = nx;
    out.ny = ny;
    out.cell_w = match.pitch.length / nx;
    out.cell_h = match.pitch.width / ny;
    std::map<std::int64_t, const ValuedAction*> by_index;
    for (const auto& a : v.actions) by_index[a.action_index] = &a;
    for (const auto& alloc : v.allocations) {
        const ValuedAction* act = by_index.at(alloc.action_index);
        const std::string defending = match.other_team(act->attacking_team);
        int cx = static_cast<int>(act->ball_location.x / out.cell_w);
        int cy = static_cast<int>(act->ball_location.y / out.cell_h);
        cx = std::clamp(cx, 0, nx - 1);
        cy = std::clamp(cy, 0, ny - 1);
        out.grid(defending, alloc.category)[static_cast<std::size_t>(cy) * nx + cx] +=
            alloc.credit;
    }
    return out;
}

inline void merge_into(ZoneGrid& into, const ZoneGrid& from) {
    if (into.nx != from.nx || into.ny != from.ny)
        throw std::runtime_error("zone grids have mismatched dimensions");
    for (const auto& [team, arr] : from.cells)
        for (int c = 0; c < 4; ++c) {
            if (arr[c].empty()) continue;
            auto& g = into.grid(team, static_cast<CreditCategory>(c));
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += arr[c][i];
        }
}

inline void write_zone_csv(const std::string& path, const ZoneGrid& zones,
                           const std::string& team, CreditCategory cat) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write zone grid: " + path);
    out.precision(17);
    out << "cell_x,cell_y,credit\n";
    auto it = zones.cells.find(team);
    for (int cy = 0; cy < zones.ny; ++cy)
        for (int cx = 0; cx < zones.nx; ++cx) {
            double val = 0.0;
            if (it != zones.cells.end() && !it->second[static_cast<int>(cat)].empty())
                val = it->second[static_cast<int>(cat)][static_cast<std::size_t>(cy) * zones.nx +
                                                        cx];
            out << cx << "," << cy << "," << val << "\n";
        }
}

inline void write_heatmap_svg(const std::string& path, const ZoneGrid& zones,
                              const std::string& team, CreditCategory cat) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write heatmap: " + path);
    const double sx = 6.0, sy = 6.0;  // pixels per meter
    const double W = zones.nx * zones.cell_w * sx, H = zones.ny * zones.cell_h * sy;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    double lo = 0.0, hi = 0.0;
    auto it = zones.cells.find(team);
    const std::vector<double>* grid = nullptr;
    if (it != zones.cells.end() && !it->second[static_cast<int>(cat)].empty())
        grid = &it->second[static_cast<int>(cat)];
    if (grid)
        for (double v : *grid) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double span = std::max(1e-12, std::max(hi, -lo));
    for (int cy = 0; cy < zones.ny; ++cy)
        for (int cx = 0; cx < zones.nx; ++cx) {
            const double v = grid ? (*grid)[static_cast<std::size_t>(cy) * zones.nx + cx] : 0.0;
            const int intensity = static_cast<int>(255.0 * std::min(1.0, std::abs(v) / span));
            const std::string fill =
                v >= 0 ? "rgb(" + std::to_string(255 - intensity) + ",255," +
                             std::to_string(255 - intensity) + ")"
                       : "rgb(255," + std::to_string(255 - intensity) + "," +
                             std::to_string(255 - intensity) + ")";
            out << "<rect x=\"" << cx * zones.cell_w * sx << "\" y=\"" << cy * zones.cell_h * sy
                << "\" width=\"" << zones.cell_w * sx << "\" height=\"" << zones.cell_h * sy
                << "\" fill=\"" << fill << "\" stroke=\"#ccc\"/>\n";
        }
    out << "</svg>\n";
}

// --- timeline -------------------------------------------------------------------

struct TimelineEntry {
    std::int64_t action_index = 0;
    double time = 0.0;
    std::string action_type;
    std::string attacker_id;
    std::string dcase;
    std::vector<std::pair<std::string, double>> credits;  // defender, credit
};

// One entry per valued on-ball action; every allocation appears in exactly one
// entry.
inline std::vector<TimelineEntry> export_timeline(const MatchValuation& v) {
    std::map<std::int64_t, std::vector<std::pair<std::string, double>>> by_index;
    for (const auto& a : v.allocations) by_index[a.action_index].push_back({a.player_id, a.credit});
    std::vector<TimelineEntry> out;
    for (const auto& a : v.actions) {
        TimelineEntry e;
        e.action_index = a.action_index;
        e.time = a.time;
        e.action_type = to_string(a.type);
        e.attacker_id = a.attacker_id;
        e.dcase = to_string(a.dcase);
        if (auto it = by_index.find(a.action_index); it != by_index.end()) e.credits = it->second;
        out.push_back(std::move(e));
    }
    return out;
}

inline void write_timeline_jsonl(const std::string& path,
                                 const std::vector<TimelineEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write timeline: " + path);
    for (const auto& e : entries) {
        nlohmann::json j;
        j["action_index"] = e.action_index;
        j["time_s"] = e.time;
        j["action_type"] = e.action_type;
        j["attacker_id"] = e.attacker_id;
        j["case"] = e.dcase;
        auto credits = nlohmann::json::array();
        for (const auto& [id, c] : e.credits)
            credits.push_back({{"player_id", id}, {"credit", c}});
        j["credits"] = credits;
        out << j.dump() << "\n";
    }
}

inline std::vector<TimelineEntry> read_timeline_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open timeline: " + path);
    std::vector<TimelineEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        TimelineEntry e;
        e.action_index = j.at("action_index").get<std::int64_t>();
        e.time = j.at("time_s").get<double>();
        e.action_type = j.at("action_type").get<std::string>();
        e.attacker_id = j.at("attacker_id").get<std::string>();
        e.dcase = j.at("case").get<std::string>();
        for (const auto& c : j.at("credits"))
            e.credits.push_back({c.at("player_id").get<std::string>(),
                                 c.at("credit").get<double>()});
        out.push_back(std::move(e));
    }
    return out;
}

// SVG timeline: one horizontal lane per player, one mark per allocation;
// positive credit and penalties get distinct CSS classes.
inline void write_timeline_svg(const std::string& path,
                               const std::vector<TimelineEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write timeline SVG: " + path);
    std::set<std::string> players;
    double t_max = 1.0;
    for (const auto& e : entries) {
        t_max = std::max(t_max, e.time);
        for (const auto& [id, c] : e.credits) players.insert(id);
    }
    const double lane_h = 18.0, left = 70.0, width = 900.0;
    const double H = lane_h * std::max<std::size_t>(1, players.size()) + 20.0;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + width + 10
        << "\" height=\"" << H << "\">\n"
        << "<style>.credit{fill:#1a7f37}.penalty{fill:#cf222e}.lane{stroke:#ddd}"
           ".label{font:10px sans-serif}</style>\n";
    std::map<std::string, int> lane;
    int i = 0;
    for (const auto& p : players) {
        const double y = 12.0 + i * lane_h;
        out << "<text class=\"label\" x=\"2\" y=\"" << y + 3 << "\">" << p << "</text>\n"
            << "<line class=\"lane\" x1=\"" << left << "\" y1=\"" << y << "\" x2=\""
            << left + width << "\" y2=\"" << y << "\"/>\n";
        lane[p] = i++;
    }
    for (const auto& e : entries)
        for (const auto& [id, c] : e.credits) {
            const double x = left + width * (e.time / t_max);
            const double y = 12.0 + lane[id] * lane_h;
            const double r = std::clamp(2.0 + 40.0 * std::abs(c), 2.0, 7.0);
            out << "<circle class=\"" << (c >= 0 ? "credit" : "penalty") << "\" cx=\"" << x
                << "\" cy=\"" << y << "\" r=\"" << r << "\"><title>action " << e.action_index
                << ": " << id << " " << c << "</title></circle>\n";
        }
    out << "</svg>\n";
}

// --- market-value correlations ---------------------------------------------------

struct MarketRecord {
    std::string player_id;
    std::string position_group;
    double minutes = 0.0;
    double market_value_eur = 0.0;
};

inline std::vector<MarketRecord> read_market_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open market values: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty market file: " + path);
    std::vector<MarketRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 4) throw std::runtime_error("bad market row in " + path);
        MarketRecord r;
        r.player_id = f[0];
        r.position_group = f[1];
        r.minutes = std::stod(f[2]);
        r.market_value_eur = std::stod(f[3]);
        if (r.market_value_eur <= 0.0)
            throw std::runtime_error("market value must be positive for " + r.player_id);
        out.push_back(std::move(r));
    }
    return out;
}

struct CorrelationRow {
    std::string group;
    int players = 0;
    // intercept, disturb, deter, concede, net
    std::array<std::optional<double>, 5> r{};
};

inline const std::array<const char*, 7>& correlation_groups() {
    static const std::array<const char*, 7> g = {"Total", "DF", "MF", "FW", "CB", "SB", "CM"};
    return g;
}

inline bool group_contains(const std::string& group, const std::string& position) {
    if (group == "Total") return true;
    if (group == "DF") return position == "CB" || position == "SB";
    if (group == "MF") return position == "CM" || position == "MF";
    if (group == "FW") return position == "FW";
    return group == position;
}

// Pearson r between per-90 category credits and ln(market value), per role
// group. Groups with fewer than 3 players report absent coefficients.
inline std::vector<CorrelationRow> correlation_report(
    const std::vector<PlayerCreditSummary>& summaries, const std::vector<MarketRecord>& market) {
    std::map<std::string, const MarketRecord*> by_id;
    for (const auto& m : market) by_id[m.player_id] = &m;
    std::vector<CorrelationRow> out;
    for (const char* group : correlation_groups()) {
        CorrelationRow row;
        row.group = group;
        std::array<std::vector<double>, 5> xs;
        std::vector<double> ln_values;
        for (const auto& s : summaries) {
            auto it = by_id.find(s.player_id);
            if (it == by_id.end()) continue;
            if (!group_contains(group, it->second->position_group)) continue;
            for (int c = 0; c < 4; ++c) xs[c].push_back(s.per90[c]);
            xs[4].push_back(s.net_per90);
            ln_values.push_back(std::log(it->second->market_value_eur));
        }
        row.players = static_cast<int>(ln_values.size());
        if (row.players >= 3)
            for (int c = 0; c < 5; ++c) row.r[c] = pearson_correlation(xs[c], ln_values);
        out.push_back(std::move(row));
    }
    return out;
}

inline void write_correlations_csv(const std::string& path,
                                   const std::vector<CorrelationRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write correlations: " + path);
    out.precision(17);
    out << "group,players,intercept_r,disturb_r,deter_r,concede_r,net_r\n";
    for (const auto& row : rows) {
        out << row.group << "," << row.players;
        for (int c = 0; c < 5; ++c) {
            out << ",";
            if (row.r[c]) out << *row.r[c];
        }
        out << "\n";
    }
}

// --- full report directory -------------------------------------------------------

struct ReportInputs {
    std::vector<const MatchValuation*> valuations;
    std::vector<const MatchData*> matches;  // aligned
};

inline void write_reports(const std::filesystem::path& dir, const ReportInputs& in,
                          double minutes_threshold = 900.0, int zones_x = 12, int zones_y = 8,
                          const std::optional<std::string>& market_csv = std::nullopt) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::vector<MatchAggregate> aggregates;
    PairMatrix pairs;
    ZoneGrid zones;
    zones.nx = zones_x;
    zones.ny = zones_y;
    std::vector<TimelineEntry> timeline;
    std::set<std::string> teams;
    for (std::size_t i = 0; i < in.valuations.size(); ++i) {
        const MatchValuation& v = *in.valuations[i];
        const MatchData& m = *in.matches[i];
        aggregates.push_back(aggregate_match(v, m));
        merge_into(pairs, pairwise_matrix(v));
        merge_into(zones, zone_heatmap(v, m, zones_x, zones_y));
        auto t = export_timeline(v);
        timeline.insert(timeline.end(), t.begin(), t.end());
        for (const auto& p : m.players) teams.insert(p.team_id);
    }
    const auto summaries = summarize_players(aggregates, minutes_threshold);
    write_summary_csv((dir / "summary.csv").string(), summaries);
    write_pair_csv((dir / "pairs_credit.csv").string(), pairs.credit);
    write_pair_csv((dir / "pairs_penalty.csv").string(), pairs.penalty);
    static const std::array<const char*, 4> cat_names = {"intercept", "disturb", "deter",
                                                         "concede"};
    for (const auto& team : teams)
        for (int c = 0; c < 4; ++c) {
            const auto cat = static_cast<CreditCategory>(c);
            write_zone_csv((dir / ("zones_" + team + "_" + cat_names[c] + ".csv")).string(),
                           zones, team, cat);
            write_heatmap_svg((dir / ("heatmap_" + team + "_" + cat_names[c] + ".svg")).string(),
                              zones, team, cat);
        }
    write_timeline_jsonl((dir / "timeline.jsonl").string(), timeline);
    write_timeline_svg((dir / "timeline.svg").string(), timeline);
    if (market_csv) {
        const auto market = read_market_csv(*market_csv);
        write_correlations_csv((dir / "correlations.csv").string(),
                               correlation_report(summaries, market));
    }
}

}  // namespace defcon
