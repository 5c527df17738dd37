#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "defcon/data.hpp"
#include "defcon/kinematics.hpp"

namespace defcon {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

// Tracking CSV: frame,time_s,entity_id,team_id,x_m,y_m,z_m (header required).
// Rows with entity_id=ball carry z; player rows may leave z empty.
inline std::vector<Snapshot> parse_tracking(const std::string& path, const Pitch& pitch) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open tracking file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("tracking file is empty: " + path);
    if (line.find("frame") == std::string::npos)
        throw std::runtime_error("tracking file missing header: " + path);

    struct Row {
        std::int64_t frame;
        double time;
        std::string entity;
        std::string team;
        double x, y, z;
    };
    std::vector<Row> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() < 7)
            throw std::runtime_error("tracking parse error at line " + std::to_string(lineno) +
                                     ": expected 7 fields");
        Row r;
        try {
            r.frame = std::stoll(fields[0]);
            r.time = std::stod(fields[1]);
            r.entity = fields[2];
            r.team = fields[3];
            r.x = std::stod(fields[4]);
            r.y = std::stod(fields[5]);
            r.z = fields[6].empty() ? 0.0 : std::stod(fields[6]);
        } catch (const std::exception&) {
            throw std::runtime_error("tracking parse error at line " + std::to_string(lineno));
        }
        if (r.x < -5.0 || r.x > pitch.length + 5.0 || r.y < -5.0 || r.y > pitch.width + 5.0)
            throw std::runtime_error("tracking position out of bounds at line " +
                                     std::to_string(lineno));
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw std::runtime_error("tracking file has no data rows: " + path);

    // frame order and per-frame grouping
    std::vector<std::int64_t> frames;
    std::map<std::int64_t, double> frame_time;
    for (const auto& r : rows) {
        if (frame_time.emplace(r.frame, r.time).second) frames.push_back(r.frame);
    }
    if (!std::is_sorted(frames.begin(), frames.end()))
        throw std::runtime_error("tracking frames are not increasing: " + path);

    std::map<std::int64_t, std::size_t> frame_index;
    for (std::size_t i = 0; i < frames.size(); ++i) frame_index[frames[i]] = i;

    const std::size_t n = frames.size();
    double dt = 0.04;
    if (n >= 2) {
        dt = (frame_time[frames.back()] - frame_time[frames.front()]) /
             static_cast<double>(frames.back() - frames.front());
        if (dt <= 0.0) dt = 0.04;
    }

    std::map<std::string, std::vector<Vec2>> positions;  // per entity, per frame slot
    std::map<std::string, std::vector<bool>> seen;
    std::vector<double> ball_height(n, 0.0);
    std::vector<bool> ball_seen(n, false);
    std::vector<Vec2> ball_pos(n);

    for (const auto& r : rows) {
        const std::size_t fi = frame_index[r.frame];
        if (r.entity == "ball") {
            ball_pos[fi] = {r.x, r.y};
            ball_height[fi] = r.z;
            ball_seen[fi] = true;
            continue;
        }
        auto [it, inserted] = positions.try_emplace(r.entity, std::vector<Vec2>(n));
        if (inserted) seen[r.entity] = std::vector<bool>(n, false);
        it->second[fi] = {r.x, r.y};
        seen[r.entity][fi] = true;
    }

    for (std::size_t i = 0; i < n; ++i)
        if (!ball_seen[i])
            throw std::runtime_error("missing ball row for frame " + std::to_string(frames[i]));
    for (const auto& [entity, flags] : seen)
        for (std::size_t i = 0; i < n; ++i)
            if (!flags[i])
                throw std::runtime_error("missing row for entity " + entity + " at frame " +
                                         std::to_string(frames[i]));

    std::map<std::string, KinematicsSeries> kin;
    for (const auto& [entity, pos] : positions) {
        if (n >= 2)
            kin[entity] = derive_kinematics(pos, dt);
        else {
            KinematicsSeries k;
            k.velocity.assign(1, Vec2{});
            k.speed.assign(1, 0.0);
            k.acceleration.assign(1, 0.0);
            kin[entity] = k;
        }
    }

    std::vector<Snapshot> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].frame = frames[i];
        out[i].time = frame_time[frames[i]];
        out[i].ball = {ball_pos[i], ball_height[i]};
        for (const auto& [entity, pos] : positions) {
            PlayerState st;
            st.position = pos[i];
            st.velocity = kin[entity].velocity[i];
            st.speed = kin[entity].speed[i];
            st.acceleration = kin[entity].acceleration[i];
            out[i].players[entity] = st;
        }
    }
    return out;
}

inline EventRecord event_from_json(const nlohmann::json& j) {
    EventRecord e;
    e.index = j.at("index").get<std::int64_t>();
    const std::string t = j.at("action_type").get<std::string>();
    if (t == "pass")
        e.action_type = ActionType::Pass;
    else if (t == "dribble")
        e.action_type = ActionType::Dribble;
    else if (t == "shot")
        e.action_type = ActionType::Shot;
    else if (t == "foul_won")
        e.action_type = ActionType::FoulWon;
    else if (t == "set_piece")
        e.action_type = ActionType::SetPiece;
    else
        throw std::runtime_error("unknown action_type: " + t);
    e.team_id = j.at("team_id").get<std::string>();
    e.actor_id = j.at("actor_id").get<std::string>();
    e.frame = j.at("frame").get<std::int64_t>();
    const std::string o = j.at("outcome").get<std::string>();
    if (o == "success")
        e.outcome = Outcome::Success;
    else if (o == "fail")
        e.outcome = Outcome::Fail;
    else
        throw std::runtime_error("unknown outcome: " + o);
    if (j.contains("receiver_id") && !j["receiver_id"].is_null())
        e.receiver_id = j["receiver_id"].get<std::string>();
    if (j.contains("failure_cause") && !j["failure_cause"].is_null()) {
        const std::string c = j["failure_cause"].get<std::string>();
        if (c == "defensive_action")
            e.failure_cause = FailureCause::DefensiveAction;
        else if (c == "out_of_play")
            e.failure_cause = FailureCause::OutOfPlay;
        else if (c == "offside")
            e.failure_cause = FailureCause::Offside;
        else
            throw std::runtime_error("unknown failure_cause: " + c);
    }
    if (j.contains("interceptor_id") && !j["interceptor_id"].is_null())
        e.interceptor_id = j["interceptor_id"].get<std::string>();
    if (j.contains("shot_flags") && !j["shot_flags"].is_null()) {
        ShotFlags f;
        f.blocked = j["shot_flags"].value("blocked", false);
        f.on_target = j["shot_flags"].value("on_target", false);
        f.is_goal = j["shot_flags"].value("is_goal", false);
        e.shot_flags = f;
    }
    if (j.contains("set_piece_kind") && !j["set_piece_kind"].is_null()) {
        const std::string k = j["set_piece_kind"].get<std::string>();
        if (k == "open_play")
            e.set_piece_kind = SetPieceKind::OpenPlay;
        else if (k == "free_kick")
            e.set_piece_kind = SetPieceKind::FreeKick;
        else if (k == "corner")
            e.set_piece_kind = SetPieceKind::Corner;
        else if (k == "penalty")
            e.set_piece_kind = SetPieceKind::Penalty;
        else
            throw std::runtime_error("unknown set_piece_kind: " + k);
    }
    return e;
}

inline nlohmann::json event_to_json(const EventRecord& e) {
    nlohmann::json j;
    j["index"] = e.index;
    j["action_type"] = to_string(e.action_type);
    j["team_id"] = e.team_id;
    j["actor_id"] = e.actor_id;
    j["frame"] = e.frame;
    j["outcome"] = e.outcome == Outcome::Success ? "success" : "fail";
    if (e.receiver_id) j["receiver_id"] = *e.receiver_id;
    if (e.failure_cause) {
        switch (*e.failure_cause) {
            case FailureCause::DefensiveAction: j["failure_cause"] = "defensive_action"; break;
            case FailureCause::OutOfPlay: j["failure_cause"] = "out_of_play"; break;
            case FailureCause::Offside: j["failure_cause"] = "offside"; break;
        }
    }
    if (e.interceptor_id) j["interceptor_id"] = *e.interceptor_id;
    if (e.shot_flags)
        j["shot_flags"] = {{"blocked", e.shot_flags->blocked},
                           {"on_target", e.shot_flags->on_target},
                           {"is_goal", e.shot_flags->is_goal}};
    if (e.set_piece_kind) {
        switch (*e.set_piece_kind) {
            case SetPieceKind::OpenPlay: j["set_piece_kind"] = "open_play"; break;
            case SetPieceKind::FreeKick: j["set_piece_kind"] = "free_kick"; break;
            case SetPieceKind::Corner: j["set_piece_kind"] = "corner"; break;
            case SetPieceKind::Penalty: j["set_piece_kind"] = "penalty"; break;
        }
    }
    return j;
}

inline std::vector<EventRecord> parse_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open events file: " + path);
    std::vector<EventRecord> out;
    std::string line;
    std::size_t lineno = 0;
    std::int64_t last_frame = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            out.push_back(event_from_json(j));
        } catch (const std::exception& ex) {
            throw std::runtime_error("events parse error at line " + std::to_string(lineno) +
                                     ": " + ex.what());
        }
        if (out.back().frame < last_frame)
            throw std::runtime_error("event frames not monotone at line " +
                                     std::to_string(lineno));
        last_frame = out.back().frame;
    }
    return out;
}

inline std::vector<PlayerIdentity> parse_lineups(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lineups file: " + path);
    nlohmann::json j;
    in >> j;
    std::vector<PlayerIdentity> out;
    for (const auto& pj : j.at("players")) {
        PlayerIdentity p;
        p.player_id = pj.at("player_id").get<std::string>();
        p.team_id = pj.at("team_id").get<std::string>();
        p.is_goalkeeper = pj.value("is_goalkeeper", false);
        p.position_group = position_group_from(pj.value("position_group", std::string("other")));
        p.display_name = pj.value("display_name", p.player_id);
        out.push_back(std::move(p));
    }
    return out;
}

inline void write_lineups(const std::string& path, const std::vector<PlayerIdentity>& players) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : players)
        arr.push_back({{"player_id", p.player_id},
                       {"team_id", p.team_id},
                       {"is_goalkeeper", p.is_goalkeeper},
                       {"position_group", to_string(p.position_group)},
                       {"display_name", p.display_name}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write lineups file: " + path);
    out << nlohmann::json{{"players", arr}}.dump(2) << "\n";
}

}  // namespace defcon
