#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "defcon/data.hpp"
#include "defcon/geometry.hpp"

namespace defcon {

// Node feature slots, in checkpoint order. Slot 25 is the optional
// action-of-interest indicator appended by condition_on_action.
inline constexpr int kNumNodeFeatures = 25;
inline constexpr int kNumEdgeFeatures = 2;

inline const std::array<const char*, 26>& feature_slot_names() {
    static const std::array<const char*, 26> names = {
        "ball_carrier",     "teammate_of_carrier", "goalkeeper",       "goal",
        "pos_x",            "pos_y",               "vel_x",            "vel_y",
        "speed",            "acceleration",        "goal_distance",    "goal_angle_sin",
        "goal_angle_cos",   "ball_height",         "ball_distance",    "ball_angle_sin",
        "ball_angle_cos",   "carrier_vel_sin",     "carrier_vel_cos",  "nearest_opp_distance",
        "opp_within_3m",    "opp_goal_side",       "opp_in_triangle",  "passline_opp_distance",
        "passline_corridor_count", "action_indicator"};
    return names;
}

inline std::uint64_t feature_schema_hash() {
    // FNV-1a over the joined slot names
    std::uint64_t h = 1469598103934665603ULL;
    for (const char* name : feature_slot_names()) {
        for (const char* c = name; *c; ++c) {
            h ^= static_cast<std::uint64_t>(*c);
            h *= 1099511628211ULL;
        }
        h ^= static_cast<std::uint64_t>('|');
        h *= 1099511628211ULL;
    }
    return h;
}

struct GraphSample {
    std::vector<std::string> node_ids;  // attacking players, defending players, target goal, other goal
    int num_features = kNumNodeFeatures;
    std::vector<double> node_features;             // row-major |V| x num_features
    std::vector<std::pair<int, int>> edges;        // ordered pairs (u, v), u != v
    std::vector<double> edge_features;             // |E| x 2: distance, same-team
    std::vector<char> mask_teammates;              // V+: attacking players + target goal
    std::vector<char> mask_defenders;              // V-: defending players
    std::vector<char> is_goalkeeper;
    int actor_index = -1;
    int target_goal_index = -1;
    int other_goal_index = -1;

    int num_nodes() const { return static_cast<int>(node_ids.size()); }
    double& feature(int node, int slot) {
        return node_features[static_cast<std::size_t>(node) * num_features + slot];
    }
    double feature(int node, int slot) const {
        return node_features[static_cast<std::size_t>(node) * num_features + slot];
    }
};

namespace detail {

struct NodeGeom {
    Vec2 pos;
    Vec2 vel;
    double speed = 0.0;
    double accel = 0.0;
    bool attacking = false;
    bool goalkeeper = false;
    bool is_goal = false;
};

}  // namespace detail

// Builds the fully connected per-action graph. Coordinates are normalized so
// the attacking team plays toward +x (a 180 degree rotation when needed,
// decided by the defending goalkeeper's side).
inline GraphSample build_graph(const ActionInstance& action, const Pitch& pitch,
                               const std::vector<PlayerIdentity>& players) {
    const std::string& att_team = action.attacking_team_id;
    std::vector<const PlayerIdentity*> attackers, defenders;
    for (const auto& p : players) {
        (p.team_id == att_team ? attackers : defenders).push_back(&p);
    }
    if (attackers.empty() || defenders.empty())
        throw std::runtime_error("build_graph: need players from 2 teams");
    auto by_id = [](const PlayerIdentity* a, const PlayerIdentity* b) {
        return a->player_id < b->player_id;
    };
    std::sort(attackers.begin(), attackers.end(), by_id);
    std::sort(defenders.begin(), defenders.end(), by_id);

    const Snapshot& snap = action.snapshot;
    auto state_of = [&](const std::string& id) -> const PlayerState& {
        auto it = snap.players.find(id);
        if (it == snap.players.end())
            throw std::runtime_error("build_graph: missing kinematics for player " + id);
        return it->second;
    };

    // attack direction from the defending goalkeeper's side
    Vec2 def_gk_pos{pitch.length / 2.0, pitch.width / 2.0};
    for (const auto* p : defenders)
        if (p->is_goalkeeper) def_gk_pos = state_of(p->player_id).position;
    const bool attack_right = def_gk_pos.x >= pitch.length / 2.0;

    auto norm_pos = [&](Vec2 v) -> Vec2 {
        if (attack_right) return v;
        return {pitch.length - v.x, pitch.width - v.y};
    };
    auto norm_vel = [&](Vec2 v) -> Vec2 {
        if (attack_right) return v;
        return {-v.x, -v.y};
    };

    const Vec2 target_goal = pitch.goal_center_right();  // normalized frame
    const Vec2 own_goal = pitch.goal_center_left();
    auto [post_lo, post_hi] = pitch.goalposts(true);
    auto [own_post_lo, own_post_hi] = pitch.goalposts(false);

    GraphSample g;
    std::vector<detail::NodeGeom> geo;
    auto add_player = [&](const PlayerIdentity* p, bool attacking) {
        const PlayerState& st = state_of(p->player_id);
        detail::NodeGeom n;
        n.pos = norm_pos(st.position);
        n.vel = norm_vel(st.velocity);
        n.speed = st.speed;
        n.accel = st.acceleration;
        n.attacking = attacking;
        n.goalkeeper = p->is_goalkeeper;
        geo.push_back(n);
        g.node_ids.push_back(p->player_id);
    };
    for (const auto* p : attackers) add_player(p, true);
    for (const auto* p : defenders) add_player(p, false);

    detail::NodeGeom tg;
    tg.pos = target_goal;
    tg.attacking = true;
    tg.is_goal = true;
    geo.push_back(tg);
    g.node_ids.push_back(kGoalToken);
    detail::NodeGeom og;
    og.pos = own_goal;
    og.attacking = false;
    og.is_goal = true;
    geo.push_back(og);
    g.node_ids.push_back("__own_goal__");

    const int nv = static_cast<int>(geo.size());
    g.target_goal_index = nv - 2;
    g.other_goal_index = nv - 1;
    for (int i = 0; i < nv; ++i)
        if (!geo[i].is_goal && g.node_ids[i] == action.event.actor_id) g.actor_index = i;
    if (g.actor_index < 0) throw std::runtime_error("build_graph: actor not found in snapshot");

    g.mask_teammates.assign(nv, 0);
    g.mask_defenders.assign(nv, 0);
    g.is_goalkeeper.assign(nv, 0);
    for (int i = 0; i < nv; ++i) {
        if (geo[i].is_goal) {
            if (i == g.target_goal_index) g.mask_teammates[i] = 1;
            continue;
        }
        if (geo[i].attacking)
            g.mask_teammates[i] = 1;
        else
            g.mask_defenders[i] = 1;
        g.is_goalkeeper[i] = geo[i].goalkeeper ? 1 : 0;
    }

    const Vec2 ball = norm_pos(snap.ball.position);
    const double ball_h = snap.ball.height;
    const Vec2 carrier_vel = geo[g.actor_index].vel;
    const Vec2 actor_pos = geo[g.actor_index].pos;

    g.num_features = kNumNodeFeatures;
    g.node_features.assign(static_cast<std::size_t>(nv) * kNumNodeFeatures, 0.0);

    for (int i = 0; i < nv; ++i) {
        const auto& n = geo[i];
        // opponents of this node
        std::vector<Vec2> opp;
        for (int j = 0; j < nv; ++j)
            if (!geo[j].is_goal && geo[j].attacking != n.attacking) opp.push_back(geo[j].pos);

        g.feature(i, 0) = (i == g.actor_index) ? 1.0 : 0.0;
        g.feature(i, 1) =
            (i != g.actor_index && !n.is_goal && n.attacking) || i == g.target_goal_index ? 1.0
                                                                                          : 0.0;
        g.feature(i, 2) = n.goalkeeper ? 1.0 : 0.0;
        g.feature(i, 3) = n.is_goal ? 1.0 : 0.0;

        g.feature(i, 4) = n.pos.x;
        g.feature(i, 5) = n.pos.y;
        g.feature(i, 6) = n.vel.x;
        g.feature(i, 7) = n.vel.y;
        g.feature(i, 8) = n.speed;
        g.feature(i, 9) = n.accel;

        g.feature(i, 10) = distance(n.pos, target_goal);
        auto [gs, gc] = sincos_vs_x_axis(target_goal - n.pos);
        g.feature(i, 11) = gs;
        g.feature(i, 12) = gc;

        g.feature(i, 13) = ball_h;
        g.feature(i, 14) = distance(n.pos, ball);
        auto [bs, bc] = sincos_vs_x_axis(ball - n.pos);
        g.feature(i, 15) = bs;
        g.feature(i, 16) = bc;
        auto [vs, vc] = sincos_between(n.vel, carrier_vel);
        g.feature(i, 17) = vs;
        g.feature(i, 18) = vc;

        double nearest = 1e9;
        int within3 = 0;
        for (const Vec2& o : opp) {
            const double d = distance(n.pos, o);
            nearest = std::min(nearest, d);
            if (d <= 3.0) ++within3;
        }
        g.feature(i, 19) = opp.empty() ? pitch.length : nearest;
        g.feature(i, 20) = within3;
        // opponents closer to their own defended goal than this node (x comparison)
        int goal_side = 0;
        for (const Vec2& o : opp) {
            if (n.attacking ? (o.x > n.pos.x) : (o.x < n.pos.x)) ++goal_side;
        }
        g.feature(i, 21) = goal_side;
        const Vec2 tri_a = n.attacking ? post_lo : own_post_lo;
        const Vec2 tri_b = n.attacking ? post_hi : own_post_hi;
        g.feature(i, 22) = triangle_count(n.pos, tri_a, tri_b, opp);

        // passing line: ball possessor to this node (zero-length for the actor)
        const Vec2 line_a = actor_pos;
        const Vec2 line_b = n.pos;
        double line_nearest = 1e9;
        for (const Vec2& o : opp) line_nearest = std::min(line_nearest, point_segment_distance(o, line_a, line_b));
        g.feature(i, 23) = opp.empty() ? pitch.length : line_nearest;
        g.feature(i, 24) = corridor_count(line_a, line_b, opp, 10.0);
    }

    g.edges.reserve(static_cast<std::size_t>(nv) * (nv - 1));
    g.edge_features.reserve(static_cast<std::size_t>(nv) * (nv - 1) * 2);
    for (int u = 0; u < nv; ++u) {
        for (int v = 0; v < nv; ++v) {
            if (u == v) continue;
            g.edges.emplace_back(u, v);
            g.edge_features.push_back(distance(geo[u].pos, geo[v].pos));
            g.edge_features.push_back(geo[u].attacking == geo[v].attacking ? 1.0 : 0.0);
        }
    }

    for (double f : g.node_features)
        if (!std::isfinite(f)) throw std::runtime_error("build_graph: non-finite feature");
    return g;
}

// Appends the action-of-interest indicator column (slot 25): 1 at the target
// node, 0 elsewhere. The target must be a pass/shot candidate (in V+).
inline GraphSample condition_on_action(const GraphSample& graph, int target_node) {
    if (target_node < 0 || target_node >= graph.num_nodes() || !graph.mask_teammates[target_node])
        throw std::runtime_error("condition_on_action: target node not in V+");
    GraphSample g = graph;
    const int nv = graph.num_nodes();
    g.num_features = kNumNodeFeatures + 1;
    g.node_features.assign(static_cast<std::size_t>(nv) * g.num_features, 0.0);
    for (int i = 0; i < nv; ++i) {
        for (int s = 0; s < kNumNodeFeatures; ++s) g.feature(i, s) = graph.feature(i, s);
        g.feature(i, kNumNodeFeatures) = (i == target_node) ? 1.0 : 0.0;
    }
    return g;
}

// A copy of the graph reflected in the pitch's long axis (y -> -y). Distances,
// counts, and x-coordinates are unchanged; only the signed y-components and the
// angle sines flip. Goals sit on the axis, so the mirrored state is an equally
// valid game state with identical outcome probabilities — usable as training
// augmentation for label-starved tasks.
inline GraphSample mirror_graph(const GraphSample& graph, double pitch_width) {
    GraphSample g = graph;
    static constexpr int kSignSlots[] = {7, 11, 15, 17};
    for (int v = 0; v < g.num_nodes(); ++v) {
        g.feature(v, 5) = pitch_width - g.feature(v, 5);
        for (const int s : kSignSlots) g.feature(v, s) = -g.feature(v, s);
    }
    return g;
}

// Number of opponents inside a corridor around a passing line (exposed for the
// feature oracle tests).
inline int passing_corridor_count(const Vec2& from, const Vec2& to,
                                  std::span<const Vec2> opponents, double width = 10.0) {
    return corridor_count(from, to, opponents, width);
}

}  // namespace defcon
