#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "defcon/epv.hpp"

namespace defcon {

enum class DefenseCase {
    PassFailDefAction,
    PassFailNoAction,
    PassSuccessEpvUp,
    PassSuccessEpvDown,
    DefenderFoul,
    ShotBlocked,
    ShotUnblocked
};

enum class CreditCategory { Intercept, Disturb, Deter, Concede };

inline const char* to_string(DefenseCase c) {
    switch (c) {
        case DefenseCase::PassFailDefAction: return "pass_fail_def_action";
        case DefenseCase::PassFailNoAction: return "pass_fail_no_action";
        case DefenseCase::PassSuccessEpvUp: return "pass_success_epv_up";
        case DefenseCase::PassSuccessEpvDown: return "pass_success_epv_down";
        case DefenseCase::DefenderFoul: return "defender_foul";
        case DefenseCase::ShotBlocked: return "shot_blocked";
        default: return "shot_unblocked";
    }
}

inline const char* to_string(CreditCategory c) {
    switch (c) {
        case CreditCategory::Intercept: return "intercept";
        case CreditCategory::Disturb: return "disturb";
        case CreditCategory::Deter: return "deter";
        default: return "concede";
    }
}

struct CreditAllocation {
    std::int64_t action_index = 0;
    std::string player_id;
    double credit = 0.0;
    CreditCategory category = CreditCategory::Disturb;
    DefenseCase dcase = DefenseCase::PassFailNoAction;
};

// Eq. 3-4: D = epv_k - epv_next', with epv_next' = +1 on an attacker goal and
// the next state's EPV negated when possession changed hands.
inline double team_defensive_value(double epv_k, double epv_next, bool possession_changed,
                                   bool goal_scored) {
    const double next = goal_scored ? 1.0 : (possession_changed ? -epv_next : epv_next);
    return epv_k - next;
}

// Eq. 6: the interceptor earns the on-ball share p*D (Intercept); the
// positioning share (1-p)*D is split by responsibility (Disturb).
inline std::vector<CreditAllocation> allocate_pass_fail_defensive_action(
    std::int64_t k, double D, double p, const std::map<std::string, double>& w,
    const std::string& interceptor) {
    if (!w.count(interceptor))
        throw std::runtime_error("allocate: interceptor " + interceptor + " not among defenders");
    std::vector<CreditAllocation> out;
    out.push_back({k, interceptor, p * D, CreditCategory::Intercept,
                   DefenseCase::PassFailDefAction});
    for (const auto& [v, wv] : w)
        out.push_back({k, v, wv * (1.0 - p) * D, CreditCategory::Disturb,
                       DefenseCase::PassFailDefAction});
    return out;
}

// Eq. 7: failure with no on-ball defensive action — all of D by responsibility.
inline std::vector<CreditAllocation> allocate_pass_fail_no_action(
    std::int64_t k, double D, const std::map<std::string, double>& w) {
    std::vector<CreditAllocation> out;
    for (const auto& [v, wv] : w)
        out.push_back({k, v, wv * D, CreditCategory::Disturb, DefenseCase::PassFailNoAction});
    return out;
}

// Eq. 8: successful progression (D < 0) penalized by responsibility.
inline std::vector<CreditAllocation> allocate_pass_success_epv_up(
    std::int64_t k, double D, const std::map<std::string, double>& w) {
    if (D >= 0.0)
        throw std::runtime_error("allocate_pass_success_epv_up: D must be negative");
    std::vector<CreditAllocation> out;
    for (const auto& [v, wv] : w)
        out.push_back({k, v, wv * D, CreditCategory::Concede, DefenseCase::PassSuccessEpvUp});
    return out;
}

// Eq. 9-12: successful pass that still lowered EPV. D is shared across the
// threatening options in proportion to the forgone gaps g(a) = max(0, E1(a) -
// action_epv(a)), then split inside each option by its responsibilities.
// When A+ is empty or all gaps vanish, D falls back to the executed option's
// responsibilities. D = 0 yields no allocations.
inline std::vector<CreditAllocation> allocate_pass_success_epv_down(
    std::int64_t k, double D, const ComponentValues& values, const EPVBreakdown& breakdown) {
    if (D < 0.0) throw std::runtime_error("allocate_pass_success_epv_down: D must be >= 0");
    std::vector<CreditAllocation> out;
    if (D == 0.0) return out;

    std::map<std::string, double> totals;
    double gap_sum = 0.0;
    std::vector<double> gaps(values.options.size(), 0.0);
    for (std::size_t a = 0; a < values.options.size(); ++a) {
        if (!breakdown.threatening[a]) continue;
        gaps[a] = std::max(0.0, values.options[a].e1 - breakdown.action_epv[a]);
        gap_sum += gaps[a];
    }
    if (gap_sum > 0.0) {
        for (std::size_t a = 0; a < values.options.size(); ++a) {
            if (gaps[a] <= 0.0) continue;
            const double share = D * gaps[a] / gap_sum;
            for (const auto& [v, wv] : values.options[a].w) totals[v] += wv * share;
        }
    } else {
        if (values.executed < 0)
            throw std::runtime_error(
                "allocate_pass_success_epv_down: fallback needs the executed option");
        for (const auto& [v, wv] : values.options[values.executed].w) totals[v] += wv * D;
    }
    for (const auto& [v, credit] : totals)
        out.push_back({k, v, credit, CreditCategory::Deter, DefenseCase::PassSuccessEpvDown});
    return out;
}

// Fouls: the value swing to the ensuing set piece lands entirely on the fouler.
inline std::vector<CreditAllocation> allocate_foul(std::int64_t k, double epv_k,
                                                   double set_piece_epv_next,
                                                   const std::string& fouler) {
    const double credit = epv_k - set_piece_epv_next;
    return {{k, fouler, credit, credit > 0.0 ? CreditCategory::Deter : CreditCategory::Concede,
             DefenseCase::DefenderFoul}};
}

// Blocked shot: Eq. 6 algebra with the blocker in the interceptor role and
// p = the unblocked probability. Blockers are outfielders by definition.
inline std::vector<CreditAllocation> allocate_shot_blocked(std::int64_t k, double D,
                                                           double p_unblocked,
                                                           const std::map<std::string, double>& w,
                                                           const std::string& blocker) {
    if (!w.count(blocker))
        throw std::runtime_error("allocate_shot_blocked: blocker " + blocker +
                                 " not among outfield defenders (goalkeeper cannot block)");
    auto out = allocate_pass_fail_defensive_action(k, D, p_unblocked, w, blocker);
    for (auto& a : out) a.dcase = DefenseCase::ShotBlocked;
    return out;
}

// Unblocked shot (Eq. 14-15): outfielders share epv_k - U by responsibility;
// the goalkeeper answers for the realized outcome when the shot is on target.
// Intentionally non-conserving.
inline std::vector<CreditAllocation> allocate_shot_unblocked(
    std::int64_t k, double epv_k, double U, const std::map<std::string, double>& w,
    bool on_target, double epv_next_prime, bool goal, const std::string& goalkeeper) {
    std::vector<CreditAllocation> out;
    for (const auto& [v, wv] : w) {
        if (v == goalkeeper) continue;
        out.push_back(
            {k, v, wv * (epv_k - U), CreditCategory::Concede, DefenseCase::ShotUnblocked});
    }
    if (on_target) {
        const double credit = U - (goal ? 1.0 : epv_next_prime);
        out.push_back({k, goalkeeper, credit,
                       credit > 0.0 ? CreditCategory::Intercept : CreditCategory::Concede,
                       DefenseCase::ShotUnblocked});
    }
    return out;
}

// Deterministic case routing per §2.4-§2.5.
inline DefenseCase route_case(const ActionInstance& action, double D) {
    const EventRecord& e = action.event;
    if (e.is_shot_like()) {
        if (!e.shot_flags) throw std::runtime_error("route_case: shot without shot flags");
        return e.shot_flags->blocked ? DefenseCase::ShotBlocked : DefenseCase::ShotUnblocked;
    }
    if (e.action_type == ActionType::FoulWon) return DefenseCase::DefenderFoul;
    if (action.outcome_O == 1) {
        if (e.interceptor_id)
            throw std::runtime_error("route_case: successful pass with an interceptor");
        return D < 0.0 ? DefenseCase::PassSuccessEpvUp : DefenseCase::PassSuccessEpvDown;
    }
    if (e.failure_cause && *e.failure_cause == FailureCause::DefensiveAction && e.interceptor_id)
        return DefenseCase::PassFailDefAction;
    return DefenseCase::PassFailNoAction;
}

}  // namespace defcon
