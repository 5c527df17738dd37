#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "defcon/data.hpp"
#include "defcon/geometry.hpp"

namespace defcon {

inline constexpr double kMinReceiverDist = 0.1;    // meters
inline constexpr double kMinReceiverAngle = 0.01;  // radians
inline constexpr int kReturnHorizon = 10;          // events

// Intended receiver of a failed pass: the teammate maximizing
// r(a,v) = (min_u Dist(a,u)/Dist(a,v)) * (min_u Angle(a,u)/Angle(a,v)),
// where Dist is measured to the pass endpoint at the moment of reception and
// Angle is taken between the passing line and the passer-to-teammate line.
// Ties break by smaller Dist, then smaller player_id.
inline std::string intended_receiver(const Vec2& passer_at_release, const Vec2& pass_endpoint,
                                     const Snapshot& at_reception,
                                     const std::vector<std::string>& teammates) {
    if (teammates.empty()) throw std::runtime_error("intended_receiver: no teammates on pitch");

    const Vec2 pass_line = pass_endpoint - passer_at_release;
    struct Cand {
        std::string id;
        double dist;
        double angle;
    };
    std::vector<Cand> cands;
    cands.reserve(teammates.size());
    for (const auto& id : teammates) {
        auto it = at_reception.players.find(id);
        if (it == at_reception.players.end())
            throw std::runtime_error("intended_receiver: teammate " + id + " missing in snapshot");
        const Vec2 pos = it->second.position;
        const double d = std::max(distance(pos, pass_endpoint), kMinReceiverDist);
        const double ang =
            std::max(angle_between(pass_line, pos - passer_at_release), kMinReceiverAngle);
        cands.push_back({id, d, ang});
    }
    double min_d = cands[0].dist, min_a = cands[0].angle;
    for (const auto& c : cands) {
        min_d = std::min(min_d, c.dist);
        min_a = std::min(min_a, c.angle);
    }
    const Cand* best = &cands[0];
    double best_score = -1.0;
    for (const auto& c : cands) {
        const double score = (min_d / c.dist) * (min_a / c.angle);
        if (score > best_score ||
            (score == best_score &&
             (c.dist < best->dist || (c.dist == best->dist && c.id < best->id)))) {
            best = &c;
            best_score = score;
        }
    }
    return best->id;
}

namespace detail {

// The ten-event return window runs over on-ball attacking actions only.
inline bool in_return_universe(const EventRecord& e) {
    return e.action_type == ActionType::Pass || e.action_type == ActionType::Dribble ||
           e.action_type == ActionType::Shot || e.action_type == ActionType::SetPiece;
}

inline bool is_goal_event(const EventRecord& e) { return e.shot_flags && e.shot_flags->is_goal; }

}  // namespace detail

inline std::vector<ActionInstance> build_action_instances(const std::vector<EventRecord>& events,
                                                          const std::vector<Snapshot>& snapshots,
                                                          const std::vector<PlayerIdentity>& players) {
    std::map<std::int64_t, std::size_t> frame_index;
    for (std::size_t i = 0; i < snapshots.size(); ++i) frame_index[snapshots[i].frame] = i;

    std::map<std::string, std::vector<std::string>> team_players;
    for (const auto& p : players) team_players[p.team_id].push_back(p.player_id);

    // positions within the attacking-action universe, for the return window
    std::vector<std::size_t> universe;
    for (std::size_t i = 0; i < events.size(); ++i)
        if (detail::in_return_universe(events[i])) universe.push_back(i);
    std::map<std::size_t, std::size_t> universe_pos;
    for (std::size_t u = 0; u < universe.size(); ++u) universe_pos[universe[u]] = u;

    std::vector<ActionInstance> out;
    out.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const EventRecord& e = events[i];
        auto fit = frame_index.find(e.frame);
        if (fit == frame_index.end())
            throw std::runtime_error("event " + std::to_string(e.index) +
                                     ": frame not found in tracking data");
        ActionInstance inst;
        inst.event = e;
        inst.snapshot = snapshots[fit->second];
        inst.attacking_team_id = e.team_id;

        if (e.is_shot_like()) {
            inst.intended_receiver_id = kGoalToken;
            inst.outcome_O = (e.shot_flags && e.shot_flags->blocked) ? 0 : 1;
        } else if (e.action_type == ActionType::Dribble) {
            inst.intended_receiver_id = e.actor_id;
            inst.outcome_O = e.outcome == Outcome::Success ? 1 : 0;
        } else if (e.action_type == ActionType::FoulWon) {
            inst.intended_receiver_id = e.actor_id;
            inst.outcome_O = 0;
        } else {  // pass or non-penalty set piece
            inst.outcome_O = e.outcome == Outcome::Success ? 1 : 0;
            if (e.outcome == Outcome::Success && e.receiver_id) {
                inst.intended_receiver_id = *e.receiver_id;
            } else {
                // endpoint read from the snapshot at the next event (trajectory end)
                const std::size_t recv_snap =
                    (i + 1 < events.size() && frame_index.count(events[i + 1].frame))
                        ? frame_index.at(events[i + 1].frame)
                        : fit->second;
                const auto& release = snapshots[fit->second];
                auto ait = release.players.find(e.actor_id);
                if (ait == release.players.end())
                    throw std::runtime_error("event " + std::to_string(e.index) +
                                             ": actor not in snapshot");
                std::vector<std::string> mates;
                for (const auto& id : team_players[e.team_id])
                    if (id != e.actor_id) mates.push_back(id);
                inst.intended_receiver_id =
                    intended_receiver(ait->second.position, snapshots[recv_snap].ball.position,
                                      snapshots[recv_snap], mates);
            }
        }

        // return label over the next ten attacking actions (incl. this one)
        inst.return_G = 0;
        if (detail::in_return_universe(e)) {
            const std::size_t u0 = universe_pos.at(i);
            for (std::size_t u = u0; u < universe.size() && u <= u0 + kReturnHorizon; ++u) {
                const EventRecord& g = events[universe[u]];
                if (detail::is_goal_event(g)) {
                    inst.return_G = (g.team_id == e.team_id) ? 1 : -1;
                    break;
                }
            }
        }
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace defcon
