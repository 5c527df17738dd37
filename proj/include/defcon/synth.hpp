#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "defcon/data.hpp"
#include "defcon/epv.hpp"
#include "defcon/io.hpp"
#include "defcon/rng.hpp"
#include "defcon/uxg.hpp"
#include "defcon/valuation.hpp"

namespace defcon {

// Synthetic matches are driven by a (possession side, zone) Markov skeleton
// with exogenous zone-transition tables. Player positions are drawn fresh per
// action from zone-dependent formation anchors, so every per-action truth
// (selection, success, receiver, block, goal) has a closed form, and the
// ten-event goal horizons reduce to a small dynamic program over zones whose
// per-zone hazards are precomputed once by Monte Carlo.
struct GeneratorConfig {
    std::uint64_t seed = 1;
    int actions_per_match = 100;
    double jitter_sigma = 4.0;
    double gk_jitter_sigma = 1.5;
    double velocity_sigma = 1.5;
    double temperature = 0.7;

    // pass success: logistic in pass distance, clamped nearest defender
    // distance to the passing line, corridor count (graph slots 14/23/24)
    double pass_b0 = 2.2, pass_b_dist = -0.07, pass_b_line = 0.18, pass_b_corridor = -0.45;
    double line_clamp = 10.0;
    // dribble success: logistic in clamped nearest-defender distance
    double dribble_b0 = -0.2, dribble_b_space = 0.30, space_clamp = 8.0;
    // shot blocking: logistic in clamped triangle count and goal distance
    double block_b0 = -1.5, block_b_tri = 0.8, block_b_dist = 0.05, block_dist_ref = 15.0;
    double tri_clamp = 4.0;
    // unblocked-goal truth in the six UxG features (intercept first)
    std::array<double, kUxgFeatures + 1> uxg_beta = {0.9, -0.10, 0.05, -0.14, 1.2, 0.9, -1.1};

    // policy utilities, softmax at `temperature`
    double util_pass_p = 1.6;
    double util_progress = 0.03;  // per meter toward the goal
    double util_dribble = 1.6;
    double util_shot_scale = 12.0;
    std::array<double, 3> util_shot_bias = {-6.0, -2.5, 1.0};  // per zone

    // failure-receiver weights: exp(-a*dist to option endpoint - b*dist to line)
    double resp_dist = 0.45, resp_line = 0.12;

    // flow
    double foul_rate = 0.04;
    double penalty_given_foul = 0.18;  // zone 2 only
    double fail_defensive_share = 0.65, fail_out_share = 0.25;  // rest offside
    double dribble_tackle_share = 0.8;
    double penalty_goal = 0.76;
    double off_target_on_target_rate = 0.45;  // unblocked non-goal shots
    double forward_threshold = 5.0;           // meters of progress = forward pass

    int mc_samples = 20000;
};

struct TruthRecord {
    ComponentValues values;  // oracle probabilities; executed set when applicable
    int outcome = -1;        // realized O of the executed action (-1 for fouls)
    double c1 = 0.0;         // P(attacker goal within the ten-event window)
    double c2 = 0.0;         // P(opponent goal within the window)
};

struct GroundTruth {
    std::string match_id;
    std::vector<TruthRecord> records;
};

inline const ComponentValues& oracle_component_values(const GroundTruth& truth, int action) {
    if (action < 0 || action >= static_cast<int>(truth.records.size()))
        throw std::runtime_error("oracle_component_values: no truth for action " +
                                 std::to_string(action));
    return truth.records[action].values;
}

inline ValuesProvider oracle_values_provider(const GroundTruth& truth) {
    return [&truth](int i, const ActionInstance&, const GraphSample&) {
        return oracle_component_values(truth, i);
    };
}

class Generator {
public:
    // Scenes live in the attacker frame (attack toward +x). Index 0 is the
    // goalkeeper on both sides.
    struct Scene {
        std::array<Vec2, 11> att_pos, def_pos;
        std::array<Vec2, 11> att_vel, def_vel;
        int actor = 1;
        int zone = 1;
        bool dead_ball = false;
    };

    struct SimOption {
        int att_index = -1;  // pass target (or the actor for a dribble)
        bool shot = false;
        bool dribble = false;
        bool forward = false;
        double p = 0.0;
        double util = 0.0;
        double pi = 0.0;
        double e1 = 0.0, e0 = 0.0;
        std::array<double, 11> w{};  // over defenders, sums to 1
    };

    explicit Generator(const GeneratorConfig& cfg) : cfg_(cfg) { precompute(); }

    const GeneratorConfig& config() const { return cfg_; }

    static Vec2 attacker_anchor(int idx, int zone) {
        static const double quad_y[4] = {10, 26, 42, 58};
        static const double duo_y[2] = {24, 44};
        if (idx == 0) return {3.0, 34.0};
        if (idx <= 4) return {15.0 + 18.0 * zone, quad_y[idx - 1]};
        if (idx <= 8) return {32.0 + 20.0 * zone, quad_y[idx - 5]};
        return {std::min(96.0, 52.0 + 22.0 * zone), duo_y[idx - 9]};
    }

    static Vec2 defender_anchor(int idx, int zone) {
        static const double quad_y[4] = {10, 26, 42, 58};
        static const double duo_y[2] = {24, 44};
        if (idx == 0) return {102.0, 34.0};
        if (idx <= 4) return {50.0 + 18.0 * zone, quad_y[idx - 1]};
        if (idx <= 8) return {32.0 + 18.0 * zone, quad_y[idx - 5]};
        return {10.0 + 18.0 * zone, duo_y[idx - 9]};
    }

    // carrier_hint: attacker index carried over from the previous action;
    // presser_hint: defender index forced next to the ball (the previous
    // intended receiver after a turnover, so Eq.-20 style recovery works).
    Scene sample_scene(Rng& rng, int zone, bool dead_ball, int carrier_hint = -1,
                       int presser_hint = -1) const {
        Scene s;
        s.zone = zone;
        s.dead_ball = dead_ball;
        s.actor = carrier_hint >= 1 ? carrier_hint : sample_carrier_role(rng, zone);
        const int presser =
            presser_hint >= 1 ? presser_hint : 1 + static_cast<int>(rng.uniform_index(10));

        auto jitter = [&](double sigma) { return Vec2{rng.normal(0, sigma), rng.normal(0, sigma)}; };
        auto clamp_pos = [](Vec2 v) {
            return Vec2{std::clamp(v.x, 1.0, 104.0), std::clamp(v.y, 1.5, 66.5)};
        };
        const double third_lo[3] = {8.0, 35.0, 70.0};
        const double third_hi[3] = {34.0, 69.0, 97.0};

        for (int i = 0; i < 11; ++i) {
            const double sig = i == 0 ? cfg_.gk_jitter_sigma : cfg_.jitter_sigma;
            s.att_pos[i] = clamp_pos(attacker_anchor(i, zone) + jitter(sig));
            s.def_pos[i] = clamp_pos(defender_anchor(i, zone) + jitter(sig));
        }
        s.att_pos[s.actor] = {rng.uniform(third_lo[zone], third_hi[zone]),
                              rng.uniform(10.0, 58.0)};
        {
            const double ang = rng.uniform(0.0, 6.283185307179586);
            const double r = rng.uniform(0.5, 1.5);
            s.def_pos[presser] =
                clamp_pos(s.att_pos[s.actor] + Vec2{r * std::cos(ang), r * std::sin(ang)});
        }
        for (int i = 0; i < 11; ++i) {
            if (dead_ball) continue;
            s.att_vel[i] = {std::clamp(rng.normal(0, cfg_.velocity_sigma), -6.0, 6.0),
                            std::clamp(rng.normal(0, cfg_.velocity_sigma), -6.0, 6.0)};
            s.def_vel[i] = {std::clamp(rng.normal(0, cfg_.velocity_sigma), -6.0, 6.0),
                            std::clamp(rng.normal(0, cfg_.velocity_sigma), -6.0, 6.0)};
        }
        return s;
    }

    double unblocked_goal_probability(const Vec2& shot_pos, bool set_piece, bool header) const {
        const auto f = shot_features(shot_pos, pitch_, true, set_piece, header);
        double z = cfg_.uxg_beta[0];
        for (int i = 0; i < kUxgFeatures; ++i) z += cfg_.uxg_beta[i + 1] * f[i];
        return sigmoid(z);
    }

    // All options with true probabilities and DP-backed outcome values.
    std::vector<SimOption> compute_options(const Scene& s, bool pass_only) const {
        std::vector<SimOption> out;
        const Vec2 actor = s.att_pos[s.actor];
        std::array<Vec2, 11> defs = s.def_pos;

        for (int v = 0; v < 11; ++v) {
            if (v == s.actor) continue;
            SimOption o;
            o.att_index = v;
            const Vec2 tgt = s.att_pos[v];
            const double dist = distance(actor, tgt);
            double line = 1e9;
            for (const Vec2& d : defs) line = std::min(line, point_segment_distance(d, actor, tgt));
            const int corridor = corridor_count(actor, tgt, defs, 10.0);
            o.p = sigmoid(cfg_.pass_b0 + cfg_.pass_b_dist * dist +
                          cfg_.pass_b_line * std::min(line, cfg_.line_clamp) +
                          cfg_.pass_b_corridor * corridor);
            o.forward = tgt.x - actor.x > cfg_.forward_threshold;
            o.util = cfg_.util_pass_p * o.p + cfg_.util_progress * (tgt.x - actor.x);
            o.w = receiver_weights(s, tgt, false);
            o.e1 = expect_value(o.forward ? kSuccFwd[s.zone] : kSuccBack[s.zone], false);
            o.e0 = expect_value(kFail[s.zone], true);
            out.push_back(o);
        }
        if (!pass_only) {
            {
                SimOption o;
                o.att_index = s.actor;
                o.dribble = true;
                double space = 1e9;
                for (const Vec2& d : defs) space = std::min(space, distance(d, actor));
                o.p = sigmoid(cfg_.dribble_b0 +
                              cfg_.dribble_b_space * std::min(space, cfg_.space_clamp));
                o.util = cfg_.util_dribble * o.p;
                o.w = receiver_weights(s, actor, false);
                o.e1 = expect_value(kSuccBack[s.zone], false);
                o.e0 = expect_value(kFail[s.zone], true);
                out.push_back(o);
            }
            {
                SimOption o;
                o.shot = true;
                const auto posts = pitch_.goalposts(true);
                const int tri = triangle_count(actor, posts.first, posts.second, defs);
                const double gd = distance(actor, pitch_.goal_center_right());
                o.p = 1.0 - sigmoid(cfg_.block_b0 +
                                    cfg_.block_b_tri * std::min<double>(tri, cfg_.tri_clamp) +
                                    cfg_.block_b_dist * (gd - cfg_.block_dist_ref));
                const double u = unblocked_goal_probability(actor, false, false);
                o.util = cfg_.util_shot_bias[s.zone] + cfg_.util_shot_scale * o.p * u;
                o.w = receiver_weights(s, pitch_.goal_center_right(), true);
                o.e1 = u;  // engine convention: shot E1 = U(s), E0 = 0
                o.e0 = 0.0;
                out.push_back(o);
            }
        }
        // softmax policy
        double mx = out[0].util;
        for (const auto& o : out) mx = std::max(mx, o.util);
        double z = 0.0;
        for (auto& o : out) {
            o.pi = std::exp((o.util - mx) / cfg_.temperature);
            z += o.pi;
        }
        for (auto& o : out) o.pi /= z;
        return out;
    }

    // True failure-receiver distribution toward an option endpoint.
    std::array<double, 11> receiver_weights(const Scene& s, const Vec2& endpoint,
                                            bool exclude_gk) const {
        const Vec2 actor = s.att_pos[s.actor];
        std::array<double, 11> w{};
        double z = 0.0;
        for (int u = 0; u < 11; ++u) {
            if (exclude_gk && u == 0) continue;
            const double d = distance(s.def_pos[u], endpoint);
            const double l = point_segment_distance(s.def_pos[u], actor, endpoint);
            w[u] = std::exp(-cfg_.resp_dist * d - cfg_.resp_line * l);
            z += w[u];
        }
        for (double& x : w) x /= z;
        return w;
    }

    std::pair<MatchData, GroundTruth> generate_match(const std::string& match_id,
                                                     std::uint64_t match_seed) const;

    // Ten-event DP values (pf, pa) for a fresh action in `zone` with `budget`
    // universe events remaining; exposed for oracle tests.
    std::pair<double, double> horizon_value(int zone, int budget) const {
        return dp_[zone][budget];
    }

    static constexpr int kHorizon = 11;  // current event + ten subsequent

private:
    enum class Mode { Normal, FreeKick, Penalty };

    struct ZoneStats {
        double q_shot = 0, q_pass_fwd = 0, q_pass_back = 0, q_dribble = 0;
        double p_pass_fwd = 0, p_pass_back = 0, p_dribble = 0;
        double goal_given_shot = 0;
        double fk_q_fwd = 0, fk_q_back = 0, fk_p_fwd = 0, fk_p_back = 0;
    };

    static double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

    static int sample_carrier_role(Rng& rng, int zone) {
        if (zone == 0) return 1 + static_cast<int>(rng.uniform_index(8));
        if (zone == 1) return 3 + static_cast<int>(rng.uniform_index(8));
        return 5 + static_cast<int>(rng.uniform_index(6));
    }

    static constexpr double kSuccFwd[3][3] = {
        {0.15, 0.75, 0.10}, {0.05, 0.35, 0.60}, {0.02, 0.28, 0.70}};
    static constexpr double kSuccBack[3][3] = {
        {0.80, 0.20, 0.00}, {0.35, 0.55, 0.10}, {0.05, 0.45, 0.50}};
    static constexpr double kFail[3][3] = {
        {0.05, 0.25, 0.70}, {0.15, 0.60, 0.25}, {0.70, 0.25, 0.05}};
    static constexpr double kShotFail[3] = {0.85, 0.13, 0.02};

    // E[G] after a transition with the full ten-event budget, from the current
    // attacker's perspective; `flip` marks possession change.
    double expect_value(const double table[3], bool flip) const {
        double v = 0.0;
        for (int z = 0; z < 3; ++z) {
            const auto [pf, pa] = dp_[z][kHorizon - 1];
            v += table[z] * (flip ? pa - pf : pf - pa);
        }
        return v;
    }

    std::pair<double, double> expect_pair(const double table[3], int budget, bool flip) const {
        double pf = 0.0, pa = 0.0;
        for (int z = 0; z < 3; ++z) {
            const auto [f, a] = dp_[z][budget];
            pf += table[z] * (flip ? a : f);
            pa += table[z] * (flip ? f : a);
        }
        return {pf, pa};
    }

    void precompute() {
        // zone-marginal hazards under the policy, Monte Carlo with a fixed
        // seed so the truth function is identical across datasets
        for (int z = 0; z < 3; ++z) {
            Rng rng = Rng::seeded(0xDEFC0DE).fork(static_cast<std::uint64_t>(z));
            ZoneStats st;
            double wf = 0, wb = 0, wfk_f = 0, wfk_b = 0;
            for (int m = 0; m < cfg_.mc_samples; ++m) {
                const Scene s = sample_scene(rng, z, false);
                for (const auto& o : compute_options(s, false)) {
                    if (o.shot) {
                        st.q_shot += o.pi;
                        const Vec2 actor = s.att_pos[s.actor];
                        st.goal_given_shot +=
                            o.pi * o.p * unblocked_goal_probability(actor, false, false);
                    } else if (o.dribble) {
                        st.q_dribble += o.pi;
                        st.p_dribble += o.pi * o.p;
                    } else if (o.forward) {
                        st.q_pass_fwd += o.pi;
                        wf += o.pi * o.p;
                    } else {
                        st.q_pass_back += o.pi;
                        wb += o.pi * o.p;
                    }
                }
                const Scene fk = sample_scene(rng, z, true);
                for (const auto& o : compute_options(fk, true)) {
                    if (o.forward) {
                        st.fk_q_fwd += o.pi;
                        wfk_f += o.pi * o.p;
                    } else {
                        st.fk_q_back += o.pi;
                        wfk_b += o.pi * o.p;
                    }
                }
            }
            const double n = cfg_.mc_samples;
            st.goal_given_shot = st.q_shot > 0 ? st.goal_given_shot / st.q_shot : 0.0;
            st.p_pass_fwd = st.q_pass_fwd > 0 ? wf / st.q_pass_fwd : 0.0;
            st.p_pass_back = st.q_pass_back > 0 ? wb / st.q_pass_back : 0.0;
            st.p_dribble = st.q_dribble > 0 ? st.p_dribble / st.q_dribble : 0.0;
            st.fk_p_fwd = st.fk_q_fwd > 0 ? wfk_f / st.fk_q_fwd : 0.0;
            st.fk_p_back = st.fk_q_back > 0 ? wfk_b / st.fk_q_back : 0.0;
            st.q_shot /= n;
            st.q_pass_fwd /= n;
            st.q_pass_back /= n;
            st.q_dribble /= n;
            st.fk_q_fwd /= n;
            st.fk_q_back /= n;
            const double fk_total = st.fk_q_fwd + st.fk_q_back;
            st.fk_q_fwd /= fk_total;
            st.fk_q_back /= fk_total;
            stats_[z] = st;
        }

        for (int z = 0; z < 3; ++z) dp_[z][0] = {0.0, 0.0};
        for (int r = 1; r <= kHorizon; ++r) {
            for (int z = 0; z < 3; ++z) {
                const ZoneStats& st = stats_[z];
                auto acc = [&](double weight, const double table[3], bool flip, double pf0 = 0.0) {
                    const auto [pf, pa] = expect_pair(table, r - 1, flip);
                    return std::pair<double, double>{weight * (pf0 + (1.0 - pf0) * pf),
                                                     weight * (1.0 - pf0) * pa};
                };
                double pf = 0.0, pa = 0.0;
                auto add = [&](std::pair<double, double> v) {
                    pf += v.first;
                    pa += v.second;
                };
                const double pen = z == 2 ? cfg_.penalty_given_foul : 0.0;
                const double nf = 1.0 - cfg_.foul_rate;
                // open-play action
                add(acc(nf * st.q_shot, kShotFail, true, st.goal_given_shot));
                add(acc(nf * st.q_pass_fwd * st.p_pass_fwd, kSuccFwd[z], false));
                add(acc(nf * st.q_pass_fwd * (1 - st.p_pass_fwd), kFail[z], true));
                add(acc(nf * st.q_pass_back * st.p_pass_back, kSuccBack[z], false));
                add(acc(nf * st.q_pass_back * (1 - st.p_pass_back), kFail[z], true));
                add(acc(nf * st.q_dribble * st.p_dribble, kSuccBack[z], false));
                add(acc(nf * st.q_dribble * (1 - st.p_dribble), kFail[z], true));
                // foul: the next universe event is the set piece
                add(acc(cfg_.foul_rate * pen, kShotFail, true, cfg_.penalty_goal));
                const double fk = cfg_.foul_rate * (1.0 - pen);
                add(acc(fk * st.fk_q_fwd * st.fk_p_fwd, kSuccFwd[z], false));
                add(acc(fk * st.fk_q_fwd * (1 - st.fk_p_fwd), kFail[z], true));
                add(acc(fk * st.fk_q_back * st.fk_p_back, kSuccBack[z], false));
                add(acc(fk * st.fk_q_back * (1 - st.fk_p_back), kFail[z], true));
                dp_[z][r] = {pf, pa};
            }
        }
    }

    GeneratorConfig cfg_;
    Pitch pitch_;
    std::array<ZoneStats, 3> stats_;
    std::array<std::array<std::pair<double, double>, kHorizon + 1>, 3> dp_;
};

inline std::pair<MatchData, GroundTruth> Generator::generate_match(
    const std::string& match_id, std::uint64_t match_seed) const {
    Rng rng = Rng::seeded(match_seed);
    const double dt = 0.04;
    const int n = cfg_.actions_per_match;

    auto pid = [](int side, int idx) {
        return (side == 0 ? std::string("h") : std::string("a")) + std::to_string(idx + 1);
    };
    auto to_pitch = [&](int side, const Vec2& v) {
        return side == 0 ? v : Vec2{pitch_.length - v.x, pitch_.width - v.y};
    };
    auto to_pitch_vel = [&](int side, const Vec2& v) {
        return side == 0 ? v : Vec2{-v.x, -v.y};
    };
    auto sample_zone = [&](const double table[3]) {
        return static_cast<int>(rng.categorical(std::array<double, 3>{table[0], table[1], table[2]}));
    };
    auto pair_after = [&](const double table[3], bool flip) {
        return expect_pair(table, kHorizon - 1, flip);
    };

    auto make_penalty_scene = [&]() {
        Scene s;
        s.zone = 2;
        s.dead_ball = true;
        s.actor = 9;
        for (int i = 0; i < 11; ++i) {
            Vec2 a = attacker_anchor(i, 2);
            Vec2 d = defender_anchor(i, 2);
            a.x = std::min(a.x, 86.0);
            d.x = std::min(d.x, 86.0);
            s.att_pos[i] = a;
            s.def_pos[i] = d;
            s.att_vel[i] = s.def_vel[i] = {0.0, 0.0};
        }
        s.att_pos[9] = {94.0, 34.0};
        s.def_pos[0] = {103.5, 34.0};
        return s;
    };

    // per-event pitch-frame state for the tracking series
    struct Emitted {
        std::array<Vec2, 22> pos, vel;  // h1..h11 then a1..a11
        Vec2 ball;
    };
    std::vector<Emitted> emitted;
    emitted.reserve(n);

    MatchData match;
    match.match_id = match_id;
    match.pitch = pitch_;
    static const PositionGroup roles[11] = {
        PositionGroup::GK, PositionGroup::SB, PositionGroup::CB, PositionGroup::CB,
        PositionGroup::SB, PositionGroup::CM, PositionGroup::MF, PositionGroup::MF,
        PositionGroup::CM, PositionGroup::FW, PositionGroup::FW};
    for (int side = 0; side < 2; ++side)
        for (int i = 0; i < 11; ++i) {
            PlayerIdentity p;
            p.player_id = pid(side, i);
            p.team_id = side == 0 ? "home" : "away";
            p.is_goalkeeper = i == 0;
            p.position_group = roles[i];
            p.display_name = p.player_id;
            match.players.push_back(std::move(p));
        }

    GroundTruth truth;
    truth.match_id = match_id;

    enum class Mode { Normal, FreeKick, Penalty };
    int side = 0, zone = 1;
    Mode mode = Mode::Normal;
    int carrier_hint = -1, presser_hint = -1;

    for (int k = 0; k < n; ++k) {
        const Scene scene = mode == Mode::Penalty
                                ? make_penalty_scene()
                                : sample_scene(rng, zone, mode == Mode::FreeKick, carrier_hint,
                                               presser_hint);
        const Vec2 actor_pos = scene.att_pos[scene.actor];
        const double uxg_here = mode == Mode::Penalty
                                    ? cfg_.penalty_goal
                                    : unblocked_goal_probability(actor_pos, false, false);

        std::vector<SimOption> options;
        if (mode == Mode::Penalty) {
            SimOption o;
            o.shot = true;
            o.p = 1.0;
            o.pi = 1.0;
            o.e1 = cfg_.penalty_goal;
            o.e0 = 0.0;
            o.w = receiver_weights(scene, pitch_.goal_center_right(), true);
            options.push_back(std::move(o));
        } else {
            options = compute_options(scene, mode == Mode::FreeKick);
        }

        TruthRecord rec;
        rec.values.uxg = uxg_here;
        for (const auto& o : options) {
            OptionValue ov;
            ov.is_shot = o.shot;
            ov.is_dribble = o.dribble;
            ov.receiver_id = o.shot ? kGoalToken : pid(side, o.att_index);
            ov.pi = o.pi;
            ov.p = o.p;
            ov.e1 = o.e1;
            ov.e0 = o.e0;
            for (int u = 0; u < 11; ++u)
                if (o.w[u] > 0.0) ov.w[pid(1 - side, u)] = o.w[u];
            rec.values.options.push_back(std::move(ov));
        }

        EventRecord e;
        e.index = k;
        e.team_id = side == 0 ? "home" : "away";
        e.frame = 150LL * k + 4;

        int next_side = side, next_zone = zone;
        Mode next_mode = Mode::Normal;
        int next_carrier = -1, next_presser = -1;

        if (mode == Mode::Normal && rng.uniform() < cfg_.foul_rate) {
            // defender fouls the carrier; the set piece follows in the same zone
            const auto fw = receiver_weights(scene, actor_pos, true);
            const int fouler = static_cast<int>(rng.categorical(fw));
            e.action_type = ActionType::FoulWon;
            e.actor_id = pid(side, scene.actor);
            e.outcome = Outcome::Fail;
            e.interceptor_id = pid(1 - side, fouler);
            rec.outcome = -1;
            next_mode = zone == 2 && rng.uniform() < cfg_.penalty_given_foul ? Mode::Penalty
                                                                             : Mode::FreeKick;
            next_carrier = scene.actor;
        } else {
            const std::vector<double> pis = [&] {
                std::vector<double> v;
                for (const auto& o : options) v.push_back(o.pi);
                return v;
            }();
            const int chosen = static_cast<int>(rng.categorical(pis));
            const SimOption& o = options[chosen];
            rec.values.executed = chosen;
            e.actor_id = pid(side, scene.actor);

            if (o.shot) {
                e.action_type = mode == Mode::Penalty ? ActionType::SetPiece : ActionType::Shot;
                if (mode == Mode::Penalty) e.set_piece_kind = SetPieceKind::Penalty;
                const bool blocked = mode != Mode::Penalty && rng.uniform() >= o.p;
                ShotFlags flags;
                flags.blocked = blocked;
                if (!blocked) {
                    const double u = mode == Mode::Penalty ? cfg_.penalty_goal : uxg_here;
                    flags.is_goal = rng.uniform() < u;
                    flags.on_target =
                        flags.is_goal || rng.uniform() < cfg_.off_target_on_target_rate;
                    rec.outcome = 1;
                    const auto [pf, pa] = pair_after(kShotFail, true);
                    rec.c1 = u + (1.0 - u) * pf;
                    rec.c2 = (1.0 - u) * pa;
                } else {
                    rec.outcome = 0;
                    std::tie(rec.c1, rec.c2) = pair_after(kShotFail, true);
                    const int blocker = static_cast<int>(rng.categorical(o.w));
                    e.interceptor_id = pid(1 - side, blocker);
                    e.failure_cause = FailureCause::DefensiveAction;
                    next_carrier = blocker;
                }
                e.outcome = blocked ? Outcome::Fail : Outcome::Success;
                e.shot_flags = flags;
                next_side = 1 - side;
                next_zone = flags.is_goal ? 1 : sample_zone(kShotFail);
            } else if (o.dribble) {
                e.action_type = ActionType::Dribble;
                const bool success = rng.uniform() < o.p;
                e.outcome = success ? Outcome::Success : Outcome::Fail;
                rec.outcome = success ? 1 : 0;
                if (success) {
                    std::tie(rec.c1, rec.c2) = pair_after(kSuccBack[zone], false);
                    next_zone = sample_zone(kSuccBack[zone]);
                    next_carrier = scene.actor;
                } else {
                    std::tie(rec.c1, rec.c2) = pair_after(kFail[zone], true);
                    next_side = 1 - side;
                    next_zone = sample_zone(kFail[zone]);
                    if (rng.uniform() < cfg_.dribble_tackle_share) {
                        const int tackler = static_cast<int>(rng.categorical(o.w));
                        e.failure_cause = FailureCause::DefensiveAction;
                        e.interceptor_id = pid(1 - side, tackler);
                        next_carrier = tackler;
                    } else {
                        e.failure_cause = FailureCause::OutOfPlay;
                    }
                }
            } else {  // pass or free kick
                e.action_type = mode == Mode::FreeKick ? ActionType::SetPiece : ActionType::Pass;
                if (mode == Mode::FreeKick) e.set_piece_kind = SetPieceKind::FreeKick;
                const bool success = rng.uniform() < o.p;
                e.outcome = success ? Outcome::Success : Outcome::Fail;
                rec.outcome = success ? 1 : 0;
                const double* table = o.forward ? kSuccFwd[zone] : kSuccBack[zone];
                if (success) {
                    e.receiver_id = pid(side, o.att_index);
                    std::tie(rec.c1, rec.c2) = pair_after(table, false);
                    next_zone = sample_zone(table);
                    next_carrier = o.att_index > 0 ? o.att_index : -1;
                } else {
                    std::tie(rec.c1, rec.c2) = pair_after(kFail[zone], true);
                    next_side = 1 - side;
                    next_zone = sample_zone(kFail[zone]);
                    const double u = rng.uniform();
                    if (u < cfg_.fail_defensive_share) {
                        const int interceptor = static_cast<int>(rng.categorical(o.w));
                        e.failure_cause = FailureCause::DefensiveAction;
                        e.interceptor_id = pid(1 - side, interceptor);
                        next_carrier = interceptor;
                    } else if (u < cfg_.fail_defensive_share + cfg_.fail_out_share) {
                        e.failure_cause = FailureCause::OutOfPlay;
                    } else {
                        e.failure_cause = FailureCause::Offside;
                    }
                    // intended receiver marks the ball next event so Eq.-20
                    // style recovery finds them
                    next_presser = o.att_index > 0 ? o.att_index : -1;
                }
            }
        }

        match.events.push_back(e);
        truth.records.push_back(std::move(rec));

        Emitted em;
        for (int i = 0; i < 11; ++i) {
            const int att_slot = side == 0 ? i : 11 + i;
            const int def_slot = side == 0 ? 11 + i : i;
            em.pos[att_slot] = to_pitch(side, scene.att_pos[i]);
            em.vel[att_slot] = to_pitch_vel(side, scene.att_vel[i]);
            em.pos[def_slot] = to_pitch(side, scene.def_pos[i]);
            em.vel[def_slot] = to_pitch_vel(side, scene.def_vel[i]);
        }
        em.ball = to_pitch(side, actor_pos);
        emitted.push_back(em);

        side = next_side;
        zone = next_zone;
        mode = next_mode;
        carrier_hint = next_carrier;
        presser_hint = next_presser;
    }

    // tracking series: nine frames per event with the event at the center and
    // linear motion inside the block, so the +-2-frame kinematics windows
    // (velocity at the event, and the speeds entering its acceleration) never
    // cross into the next event's block; then the same kinematics derivation
    // the parser applies
    const std::size_t nf = static_cast<std::size_t>(n) * 9;
    std::vector<std::vector<Vec2>> pos(22, std::vector<Vec2>(nf));
    std::vector<Vec2> ball(nf);
    std::vector<std::int64_t> frames(nf);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < 9; ++j) {
            const std::size_t fi = static_cast<std::size_t>(k) * 9 + j;
            frames[fi] = 150LL * k + j;
            const double off = (j - 4) * dt;
            const Emitted& em = emitted[k];
            for (int p = 0; p < 22; ++p) pos[p][fi] = em.pos[p] + em.vel[p] * off;
            ball[fi] = em.ball;
        }
    std::vector<KinematicsSeries> kin(22);
    for (int p = 0; p < 22; ++p) kin[p] = derive_kinematics(pos[p], dt);

    match.snapshots.resize(nf);
    for (std::size_t fi = 0; fi < nf; ++fi) {
        Snapshot& s = match.snapshots[fi];
        s.frame = frames[fi];
        s.time = static_cast<double>(frames[fi]) * dt;
        s.ball = {ball[fi], 0.1};
        for (int p = 0; p < 22; ++p) {
            PlayerState st;
            st.position = pos[p][fi];
            st.velocity = kin[p].velocity[fi];
            st.speed = kin[p].speed[fi];
            st.acceleration = kin[p].acceleration[fi];
            s.players[pid(p / 11, p % 11)] = st;
        }
    }
    return {std::move(match), std::move(truth)};
}

// --- ground-truth and match serialization ------------------------------------

inline void write_truth(const std::string& path, const GroundTruth& truth) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write truth file: " + path);
    for (std::size_t k = 0; k < truth.records.size(); ++k) {
        const TruthRecord& r = truth.records[k];
        nlohmann::json j;
        j["index"] = k;
        j["uxg"] = r.values.uxg;
        j["executed"] = r.values.executed;
        j["outcome"] = r.outcome;
        j["c1"] = r.c1;
        j["c2"] = r.c2;
        auto opts = nlohmann::json::array();
        for (const auto& o : r.values.options)
            opts.push_back({{"receiver", o.receiver_id},
                            {"shot", o.is_shot},
                            {"dribble", o.is_dribble},
                            {"pi", o.pi},
                            {"p", o.p},
                            {"e1", o.e1},
                            {"e0", o.e0},
                            {"w", o.w}});
        j["options"] = std::move(opts);
        out << j.dump() << "\n";
    }
}

inline GroundTruth read_truth(const std::string& path, const std::string& match_id = "") {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open truth file: " + path);
    GroundTruth truth;
    truth.match_id = match_id;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        if (j.at("index").get<std::size_t>() != truth.records.size())
            throw std::runtime_error("truth records out of order in " + path);
        TruthRecord r;
        r.values.uxg = j.at("uxg").get<double>();
        r.values.executed = j.at("executed").get<int>();
        r.outcome = j.at("outcome").get<int>();
        r.c1 = j.at("c1").get<double>();
        r.c2 = j.at("c2").get<double>();
        for (const auto& oj : j.at("options")) {
            OptionValue o;
            o.receiver_id = oj.at("receiver").get<std::string>();
            o.is_shot = oj.at("shot").get<bool>();
            o.is_dribble = oj.at("dribble").get<bool>();
            o.pi = oj.at("pi").get<double>();
            o.p = oj.at("p").get<double>();
            o.e1 = oj.at("e1").get<double>();
            o.e0 = oj.at("e0").get<double>();
            for (const auto& [k, v] : oj.at("w").items()) o.w[k] = v.get<double>();
            r.values.options.push_back(std::move(o));
        }
        truth.records.push_back(std::move(r));
    }
    return truth;
}

inline void write_tracking_csv(const std::string& path, const MatchData& match) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write tracking file: " + path);
    out.precision(17);
    out << "frame,time_s,entity_id,team_id,x_m,y_m,z_m\n";
    for (const auto& s : match.snapshots) {
        out << s.frame << "," << s.time << ",ball,," << s.ball.position.x << ","
            << s.ball.position.y << "," << s.ball.height << "\n";
        for (const auto& [id, st] : s.players)
            out << s.frame << "," << s.time << "," << id << "," << match.player(id).team_id << ","
                << st.position.x << "," << st.position.y << ",\n";
    }
}

inline void write_events_jsonl(const std::string& path, const std::vector<EventRecord>& events) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write events file: " + path);
    for (const auto& e : events) out << event_to_json(e).dump() << "\n";
}

inline void write_match(const std::filesystem::path& dir, const MatchData& match,
                        const GroundTruth& truth) {
    std::filesystem::create_directories(dir);
    write_tracking_csv((dir / "tracking.csv").string(), match);
    write_events_jsonl((dir / "events.jsonl").string(), match.events);
    write_lineups((dir / "lineups.json").string(), match.players);
    write_truth((dir / "truth.jsonl").string(), truth);
    std::ofstream meta(dir / "match.json");
    if (!meta) throw std::runtime_error("cannot write match metadata in " + dir.string());
    meta << nlohmann::json{{"match_id", match.match_id}}.dump(2) << "\n";
}

inline MatchData read_match(const std::filesystem::path& dir) {
    MatchData match;
    {
        std::ifstream meta(dir / "match.json");
        if (!meta) throw std::runtime_error("cannot open match metadata in " + dir.string());
        nlohmann::json j;
        meta >> j;
        match.match_id = j.at("match_id").get<std::string>();
    }
    match.players = parse_lineups((dir / "lineups.json").string());
    match.snapshots = parse_tracking((dir / "tracking.csv").string(), match.pitch);
    match.events = parse_events((dir / "events.jsonl").string());
    return match;
}

inline GroundTruth read_match_truth(const std::filesystem::path& dir) {
    GroundTruth t = read_truth((dir / "truth.jsonl").string());
    std::ifstream meta(dir / "match.json");
    if (meta) {
        nlohmann::json j;
        meta >> j;
        t.match_id = j.value("match_id", std::string());
    }
    return t;
}

// --- standalone shot sampler for the UxG model --------------------------------

inline double true_unblocked_goal_probability(const GeneratorConfig& cfg, const Pitch& pitch,
                                              const Vec2& location, bool set_piece, bool header) {
    const auto f = shot_features(location, pitch, true, set_piece, header);
    double z = cfg.uxg_beta[0];
    for (int i = 0; i < kUxgFeatures; ++i) z += cfg.uxg_beta[i + 1] * f[i];
    return 1.0 / (1.0 + std::exp(-z));
}

inline std::vector<ShotRecord> generate_shots(const GeneratorConfig& cfg, int n,
                                              std::uint64_t seed) {
    Rng rng = Rng::seeded(seed);
    Pitch pitch;
    std::vector<ShotRecord> out;
    out.reserve(n);
    (void)pitch;
    for (int i = 0; i < n; ++i) {
        // Features are drawn independently rather than derived from one pitch
        // location: position, distance, and opening angle are near-collinear on
        // the 2-D pitch manifold, which would leave the individual logistic
        // coefficients unidentifiable at this sample size. Independent draws
        // give a well-conditioned recovery problem for fit_uxg.
        ShotRecord r;
        if (rng.uniform() < 0.25) {
            // near-origin stratum pins down the intercept
            r.features = {rng.uniform(0.0, 3.0), rng.uniform(-3.0, 3.0),
                          rng.uniform(1.0, 4.0), rng.uniform(0.05, 0.3), 0.0, 0.0};
        } else {
            r.features = {rng.uniform(0.0, 30.0),  rng.uniform(-20.0, 20.0),
                          rng.uniform(1.0, 18.0),  rng.uniform(0.1, 2.0),
                          rng.uniform() < 0.5 ? 1.0 : 0.0,
                          rng.uniform() < 0.5 ? 1.0 : 0.0};
        }
        double z = cfg.uxg_beta[0];
        for (int f = 0; f < kUxgFeatures; ++f) z += cfg.uxg_beta[f + 1] * r.features[f];
        const double p = 1.0 / (1.0 + std::exp(-z));
        r.goal = rng.uniform() < p ? 1 : 0;
        out.push_back(r);
    }
    return out;
}

}  // namespace defcon
