#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "defcon/geometry.hpp"

namespace defcon {

enum class PositionGroup { GK, CB, SB, CM, MF, FW, Other };

inline const char* to_string(PositionGroup g) {
    switch (g) {
        case PositionGroup::GK: return "GK";
        case PositionGroup::CB: return "CB";
        case PositionGroup::SB: return "SB";
        case PositionGroup::CM: return "CM";
        case PositionGroup::MF: return "MF";
        case PositionGroup::FW: return "FW";
        default: return "other";
    }
}

inline PositionGroup position_group_from(const std::string& s) {
    if (s == "GK") return PositionGroup::GK;
    if (s == "CB") return PositionGroup::CB;
    if (s == "SB") return PositionGroup::SB;
    if (s == "CM") return PositionGroup::CM;
    if (s == "MF") return PositionGroup::MF;
    if (s == "FW") return PositionGroup::FW;
    return PositionGroup::Other;
}

struct PlayerIdentity {
    std::string player_id;
    std::string team_id;
    bool is_goalkeeper = false;
    PositionGroup position_group = PositionGroup::Other;
    std::string display_name;
};

struct PlayerState {
    Vec2 position;
    Vec2 velocity;
    double speed = 0.0;
    double acceleration = 0.0;
};

struct BallState {
    Vec2 position;
    double height = 0.0;
};

struct Snapshot {
    std::int64_t frame = 0;
    double time = 0.0;
    // keyed by player_id; deterministic iteration order
    std::map<std::string, PlayerState> players;
    BallState ball;
};

enum class ActionType { Pass, Dribble, Shot, FoulWon, SetPiece };
enum class Outcome { Success, Fail };
enum class FailureCause { DefensiveAction, OutOfPlay, Offside };
enum class SetPieceKind { OpenPlay, FreeKick, Corner, Penalty };

inline const char* to_string(ActionType t) {
    switch (t) {
        case ActionType::Pass: return "pass";
        case ActionType::Dribble: return "dribble";
        case ActionType::Shot: return "shot";
        case ActionType::FoulWon: return "foul_won";
        default: return "set_piece";
    }
}

struct ShotFlags {
    bool blocked = false;
    bool on_target = false;
    bool is_goal = false;
};

struct EventRecord {
    std::int64_t index = 0;
    ActionType action_type = ActionType::Pass;
    std::string team_id;
    std::string actor_id;
    std::int64_t frame = 0;
    Outcome outcome = Outcome::Success;
    std::optional<std::string> receiver_id;
    std::optional<FailureCause> failure_cause;
    std::optional<std::string> interceptor_id;
    std::optional<ShotFlags> shot_flags;
    std::optional<SetPieceKind> set_piece_kind;

    bool is_shot_like() const {
        return action_type == ActionType::Shot ||
               (action_type == ActionType::SetPiece && set_piece_kind &&
                *set_piece_kind == SetPieceKind::Penalty);
    }
};

// Token used as intended_receiver_id for shots.
inline const std::string kGoalToken = "__goal__";

struct ActionInstance {
    EventRecord event;
    Snapshot snapshot;
    std::string intended_receiver_id;  // player id or kGoalToken
    int outcome_O = 0;                 // 1 success, 0 fail
    int return_G = 0;                  // -1, 0, +1 over a ten-event horizon
    std::string attacking_team_id;
};

struct MatchData {
    std::string match_id;
    Pitch pitch;
    std::vector<PlayerIdentity> players;
    std::vector<Snapshot> snapshots;
    std::vector<EventRecord> events;

    const PlayerIdentity& player(const std::string& id) const {
        for (const auto& p : players)
            if (p.player_id == id) return p;
        throw std::runtime_error("unknown player id: " + id);
    }

    std::string goalkeeper_of(const std::string& team_id) const {
        for (const auto& p : players)
            if (p.team_id == team_id && p.is_goalkeeper) return p.player_id;
        throw std::runtime_error("no goalkeeper for team " + team_id);
    }

    std::string other_team(const std::string& team_id) const {
        for (const auto& p : players)
            if (p.team_id != team_id) return p.team_id;
        throw std::runtime_error("fewer than 2 teams");
    }
};

}  // namespace defcon
