#pragma once

#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "defcon/credit.hpp"
#include "defcon/epv.hpp"

namespace defcon {

struct ValuedAction {
    std::string match_id;
    std::int64_t action_index = 0;
    double time = 0.0;
    ActionType type = ActionType::Pass;
    std::string attacker_id;
    std::string attacking_team;
    Vec2 ball_location;  // raw pitch frame
    double epv = 0.0;    // state EPV from the attacker's perspective
    double defensive_value = 0.0;
    DefenseCase dcase = DefenseCase::PassFailNoAction;
};

struct MatchValuation {
    std::string match_id;
    std::vector<ValuedAction> actions;
    std::vector<CreditAllocation> allocations;
    std::vector<nlohmann::json> epv_dump;  // one JSON object per action
};

// Supplies ComponentValues per action: the learned bundle in normal runs, the
// generator's recorded truth in oracle runs.
using ValuesProvider =
    std::function<ComponentValues(int index, const ActionInstance&, const GraphSample&)>;

inline ValuesProvider learned_values_provider(ModelBundle& bundle, const Pitch& pitch) {
    return [&bundle, pitch](int, const ActionInstance& action, const GraphSample& g) {
        return evaluate_state(g, bundle, pitch, action.intended_receiver_id);
    };
}

inline MatchValuation value_match(const MatchData& match, const ValuesProvider& provider) {
    MatchValuation out;
    out.match_id = match.match_id;
    const auto actions = build_action_instances(match.events, match.snapshots, match.players);
    const int n = static_cast<int>(actions.size());

    std::vector<GraphSample> graphs;
    std::vector<ComponentValues> values;
    std::vector<EPVBreakdown> breakdowns;
    std::vector<double> state_epv(n, 0.0);
    graphs.reserve(n);
    values.reserve(n);
    for (int i = 0; i < n; ++i) {
        graphs.push_back(build_graph(actions[i], match.pitch, match.players));
        values.push_back(provider(i, actions[i], graphs.back()));
        breakdowns.push_back(epv(values[i]));
        const EventRecord& e = actions[i].event;
        const bool penalty = e.action_type == ActionType::SetPiece && e.set_piece_kind &&
                             *e.set_piece_kind == SetPieceKind::Penalty;
        state_epv[i] = penalty ? kPenaltyEpv : breakdowns[i].epv;
    }

    for (int i = 0; i < n; ++i) {
        const ActionInstance& a = actions[i];
        const EventRecord& e = a.event;
        const bool goal = e.shot_flags && e.shot_flags->is_goal;
        const bool changed =
            i + 1 < n && actions[i + 1].attacking_team_id != a.attacking_team_id;
        const double epv_next = i + 1 < n ? state_epv[i + 1] : 0.0;
        const double D = team_defensive_value(state_epv[i], epv_next, changed, goal);
        const DefenseCase dcase = route_case(a, D);

        auto executed_option = [&]() -> const OptionValue& {
            if (values[i].executed < 0)
                throw std::runtime_error("value_match: executed option missing for action " +
                                         std::to_string(e.index));
            return values[i].options[values[i].executed];
        };
        auto shot_option = [&]() -> const OptionValue& {
            for (const auto& o : values[i].options)
                if (o.is_shot) return o;
            throw std::runtime_error("value_match: no shot option for action " +
                                     std::to_string(e.index));
        };

        std::vector<CreditAllocation> allocs;
        switch (dcase) {
            case DefenseCase::PassFailDefAction:
                allocs = allocate_pass_fail_defensive_action(
                    e.index, D, executed_option().p, executed_option().w, *e.interceptor_id);
                break;
            case DefenseCase::PassFailNoAction:
                allocs = allocate_pass_fail_no_action(e.index, D, executed_option().w);
                break;
            case DefenseCase::PassSuccessEpvUp:
                allocs = allocate_pass_success_epv_up(e.index, D, executed_option().w);
                break;
            case DefenseCase::PassSuccessEpvDown:
                allocs = allocate_pass_success_epv_down(e.index, D, values[i], breakdowns[i]);
                break;
            case DefenseCase::DefenderFoul: {
                if (!e.interceptor_id)
                    throw std::runtime_error("value_match: foul without a fouler for action " +
                                             std::to_string(e.index));
                const double sp_next = i + 1 < n ? state_epv[i + 1] : state_epv[i];
                allocs = allocate_foul(e.index, state_epv[i], sp_next, *e.interceptor_id);
                break;
            }
            case DefenseCase::ShotBlocked:
                if (!e.interceptor_id)
                    throw std::runtime_error(
                        "value_match: blocked shot without a blocker for action " +
                        std::to_string(e.index));
                allocs = allocate_shot_blocked(e.index, D, shot_option().p, shot_option().w,
                                               *e.interceptor_id);
                break;
            case DefenseCase::ShotUnblocked: {
                const double epv_next_prime = changed ? -epv_next : epv_next;
                allocs = allocate_shot_unblocked(
                    e.index, state_epv[i], values[i].uxg, shot_option().w,
                    e.shot_flags && e.shot_flags->on_target, epv_next_prime, goal,
                    match.goalkeeper_of(match.other_team(a.attacking_team_id)));
                break;
            }
        }
        out.allocations.insert(out.allocations.end(), allocs.begin(), allocs.end());

        ValuedAction va;
        va.match_id = match.match_id;
        va.action_index = e.index;
        va.time = a.snapshot.time;
        va.type = e.action_type;
        va.attacker_id = e.actor_id;
        va.attacking_team = a.attacking_team_id;
        va.ball_location = a.snapshot.ball.position;
        va.epv = state_epv[i];
        va.defensive_value = D;
        va.dcase = dcase;
        out.actions.push_back(va);

        nlohmann::json dump;
        dump["action_index"] = e.index;
        dump["epv"] = state_epv[i];
        dump["defensive_value"] = D;
        dump["case"] = to_string(dcase);
        dump["uxg"] = values[i].uxg;
        auto opts = nlohmann::json::array();
        for (std::size_t oi = 0; oi < values[i].options.size(); ++oi) {
            const auto& o = values[i].options[oi];
            opts.push_back({{"receiver", o.receiver_id},
                            {"shot", o.is_shot},
                            {"pi", o.pi},
                            {"p", o.p},
                            {"e1", o.e1},
                            {"e0", o.e0},
                            {"action_epv", breakdowns[i].action_epv[oi]},
                            {"threatening", breakdowns[i].threatening[oi] != 0},
                            {"w", o.w}});
        }
        dump["options"] = opts;
        out.epv_dump.push_back(std::move(dump));
    }
    return out;
}

// --- valuation artifacts on disk ---------------------------------------------

inline void write_allocations_csv(const std::string& path, const std::string& match_id,
                                  const std::vector<CreditAllocation>& allocations) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write allocations: " + path);
    out << "match_id,action_index,player_id,case,category,credit\n";
    out.precision(17);
    for (const auto& a : allocations)
        out << match_id << "," << a.action_index << "," << a.player_id << ","
            << to_string(a.dcase) << "," << to_string(a.category) << "," << a.credit << "\n";
}

inline void write_valued_actions_csv(const std::string& path,
                                     const std::vector<ValuedAction>& actions) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write valued actions: " + path);
    out << "match_id,action_index,time_s,action_type,attacker_id,team_id,ball_x,ball_y,epv,"
           "defensive_value,case\n";
    out.precision(17);
    for (const auto& a : actions)
        out << a.match_id << "," << a.action_index << "," << a.time << "," << to_string(a.type)
            << "," << a.attacker_id << "," << a.attacking_team << "," << a.ball_location.x << ","
            << a.ball_location.y << "," << a.epv << "," << a.defensive_value << ","
            << to_string(a.dcase) << "\n";
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    return out;
}

inline DefenseCase case_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(DefenseCase::ShotUnblocked); ++i)
        if (s == to_string(static_cast<DefenseCase>(i))) return static_cast<DefenseCase>(i);
    throw std::runtime_error("unknown defense case: " + s);
}

inline CreditCategory category_from_string(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(CreditCategory::Concede); ++i)
        if (s == to_string(static_cast<CreditCategory>(i))) return static_cast<CreditCategory>(i);
    throw std::runtime_error("unknown credit category: " + s);
}

inline ActionType action_type_from_string(const std::string& s) {
    if (s == "pass") return ActionType::Pass;
    if (s == "dribble") return ActionType::Dribble;
    if (s == "shot") return ActionType::Shot;
    if (s == "foul_won") return ActionType::FoulWon;
    if (s == "set_piece") return ActionType::SetPiece;
    throw std::runtime_error("unknown action type: " + s);
}

}  // namespace detail

// Reads one match's allocations; returns (match_id, rows).
inline std::pair<std::string, std::vector<CreditAllocation>> read_allocations_csv(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open allocations: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty allocations file: " + path);
    std::string match_id;
    std::vector<CreditAllocation> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 6) throw std::runtime_error("bad allocations row in " + path);
        match_id = f[0];
        CreditAllocation a;
        a.action_index = std::stoll(f[1]);
        a.player_id = f[2];
        a.dcase = detail::case_from_string(f[3]);
        a.category = detail::category_from_string(f[4]);
        a.credit = std::stod(f[5]);
        rows.push_back(std::move(a));
    }
    return {match_id, rows};
}

inline std::vector<ValuedAction> read_valued_actions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open valued actions: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty valued actions file: " + path);
    std::vector<ValuedAction> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 11) throw std::runtime_error("bad valued-actions row in " + path);
        ValuedAction a;
        a.match_id = f[0];
        a.action_index = std::stoll(f[1]);
        a.time = std::stod(f[2]);
        a.type = detail::action_type_from_string(f[3]);
        a.attacker_id = f[4];
        a.attacking_team = f[5];
        a.ball_location = {std::stod(f[6]), std::stod(f[7])};
        a.epv = std::stod(f[8]);
        a.defensive_value = std::stod(f[9]);
        a.dcase = detail::case_from_string(f[10]);
        rows.push_back(std::move(a));
    }
    return rows;
}

}  // namespace defcon
