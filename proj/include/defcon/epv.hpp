#pragma once

#include <map>
#include <string>
#include <vector>

#include "defcon/graph.hpp"
#include "defcon/tasks.hpp"

namespace defcon {

inline constexpr double kPenaltyEpv = 0.7884;

// One attacking option: pass to a teammate, the dribble (self-pass), or the
// shot (target-goal node).
struct OptionValue {
    int node = -1;
    std::string receiver_id;  // player id or kGoalToken for the shot
    bool is_shot = false;
    bool is_dribble = false;
    double pi = 0.0;  // selection probability
    double p = 0.0;   // success probability
    double e1 = 0.0;  // E[G | s, a, O=1]
    double e0 = 0.0;  // E[G | s, a, O=0]
    std::map<std::string, double> w;  // defender responsibilities
};

struct ComponentValues {
    std::vector<OptionValue> options;
    double uxg = 0.0;  // U(s)
    int executed = -1; // option index of the executed action, if known
};

struct EPVBreakdown {
    double epv = 0.0;
    std::vector<double> action_epv;  // aligned with ComponentValues::options
    std::vector<char> threatening;   // A+ membership: E1(a) > epv
};

inline ComponentValues evaluate_state(const GraphSample& g, ModelBundle& bundle,
                                      const Pitch& pitch,
                                      const std::string& executed_receiver = "") {
    nn::Tape tape;
    const auto pi = head_action_selection(tape, bundle.task(TaskKind::ActionSelection), g);
    const auto psucc = head_pass_success(tape, bundle.task(TaskKind::PassSuccess), g);
    const auto block = head_shot_blocking(tape, bundle.task(TaskKind::ShotBlocking), g);
    const auto score = head_goal_probabilities(tape, bundle.task(TaskKind::GoalScoring), g);
    const auto concede = head_goal_probabilities(tape, bundle.task(TaskKind::GoalConceding), g);

    ComponentValues cv;
    const Vec2 actor_pos{g.feature(g.actor_index, 4), g.feature(g.actor_index, 5)};
    const double ball_height = g.feature(g.actor_index, 13);
    cv.uxg = bundle.uxg.predict(actor_pos, pitch, true, false, ball_height > 1.0);

    TaskModel& d1 = bundle.task(TaskKind::Responsibility);
    for (int v = 0; v < g.num_nodes(); ++v) {
        if (!g.mask_teammates[v]) continue;
        OptionValue opt;
        opt.node = v;
        opt.receiver_id = g.node_ids[v];
        opt.is_shot = v == g.target_goal_index;
        opt.is_dribble = v == g.actor_index;
        opt.pi = tape.value(pi).at(v, 0);
        if (opt.is_shot) {
            opt.p = 1.0 - tape.value(block).v[0];
            opt.e1 = cv.uxg;
            opt.e0 = 0.0;
        } else {
            opt.p = tape.value(psucc).at(v, 0);
            opt.e1 = tape.value(score).at(v, 0) - tape.value(concede).at(v, 0);
            opt.e0 = tape.value(score).at(v, 1) - tape.value(concede).at(v, 1);
        }
        {
            nn::Tape rt;
            const GraphSample cg = condition_on_action(g, v);
            const auto w = head_responsibility(rt, d1, cg, opt.is_shot);
            for (int u = 0; u < g.num_nodes(); ++u)
                if (g.mask_defenders[u] && !(opt.is_shot && g.is_goalkeeper[u]))
                    opt.w[g.node_ids[u]] = rt.value(w).at(u, 0);
        }
        if (opt.receiver_id == executed_receiver)
            cv.executed = static_cast<int>(cv.options.size());
        cv.options.push_back(std::move(opt));
    }
    return cv;
}

// Eq. 1-2 mixture plus the threatening-option set A+.
inline EPVBreakdown epv(const ComponentValues& values) {
    EPVBreakdown out;
    for (const auto& o : values.options) {
        const double a = o.p * o.e1 + (1.0 - o.p) * o.e0;
        out.action_epv.push_back(a);
        out.epv += o.pi * a;
    }
    for (const auto& o : values.options) out.threatening.push_back(o.e1 > out.epv ? 1 : 0);
    return out;
}

// Penalties carry a fixed EPV; other set pieces are valued like open play.
inline double set_piece_epv(SetPieceKind kind, const ComponentValues& values) {
    if (kind == SetPieceKind::Penalty) return kPenaltyEpv;
    return epv(values).epv;
}

}  // namespace defcon
