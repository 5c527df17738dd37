#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "defcon/actions.hpp"
#include "defcon/checkpoint.hpp"
#include "defcon/gat.hpp"
#include "defcon/graph.hpp"
#include "defcon/metrics.hpp"
#include "defcon/uxg.hpp"

namespace defcon {

enum class TaskKind {
    ActionSelection,  // a1
    PassSuccess,      // b1
    ShotBlocking,     // b2
    GoalScoring,      // c1
    GoalConceding,    // c2
    Responsibility,   // d1
    UxG               // c3
};

inline const char* to_string(TaskKind k) {
    switch (k) {
        case TaskKind::ActionSelection: return "a1";
        case TaskKind::PassSuccess: return "b1";
        case TaskKind::ShotBlocking: return "b2";
        case TaskKind::GoalScoring: return "c1";
        case TaskKind::GoalConceding: return "c2";
        case TaskKind::Responsibility: return "d1";
        default: return "uxg";
    }
}

inline TaskKind task_from_string(const std::string& s) {
    if (s == "a1") return TaskKind::ActionSelection;
    if (s == "b1") return TaskKind::PassSuccess;
    if (s == "b2") return TaskKind::ShotBlocking;
    if (s == "c1") return TaskKind::GoalScoring;
    if (s == "c2") return TaskKind::GoalConceding;
    if (s == "d1") return TaskKind::Responsibility;
    if (s == "uxg") return TaskKind::UxG;
    throw std::runtime_error("unknown task: " + s);
}

inline const std::array<TaskKind, 6>& graph_tasks() {
    static const std::array<TaskKind, 6> tasks = {
        TaskKind::ActionSelection, TaskKind::PassSuccess,   TaskKind::ShotBlocking,
        TaskKind::GoalScoring,     TaskKind::GoalConceding, TaskKind::Responsibility};
    return tasks;
}

inline bool is_multiclass(TaskKind k) {
    return k == TaskKind::ActionSelection || k == TaskKind::Responsibility;
}

struct TrainConfig {
    double learning_rate = 3e-3;
    int batch_size = 64;
    int max_epochs = 40;
    int patience = 4;
    double validation_fraction = 0.2;
    std::uint64_t seed = 1;
    int hidden = 16;  // total GAT width
    int heads = 4;
    int edge_proj = 4;
    int head_hidden = 16;
    // On a validation plateau the step size is halved (restarting from the
    // best parameters) this many times before training stops.
    int lr_decays = 3;
};

struct TaskModel {
    TaskKind kind = TaskKind::PassSuccess;
    nn::GatSpec spec;
    int head_hidden = 16;

    nn::ParamStore store;
};

inline int head_out_dim(TaskKind k) {
    return (k == TaskKind::GoalScoring || k == TaskKind::GoalConceding) ? 2 : 1;
}

inline TaskModel make_task_model(TaskKind kind, const TrainConfig& cfg) {
    TaskModel m;
    m.kind = kind;
    m.spec.in_dim = kind == TaskKind::Responsibility ? kNumNodeFeatures + 1 : kNumNodeFeatures;
    m.spec.hidden = cfg.hidden;
    m.spec.heads = cfg.heads;
    m.spec.edge_proj = cfg.edge_proj;
    m.head_hidden = cfg.head_hidden;
    nn::register_gat_params(m.store, m.spec);
    nn::register_mlp_params(m.store, "head", m.spec.hidden, m.head_hidden, head_out_dim(kind));
    return m;
}

namespace detail {

// Fixed affine input normalization (part of the architecture, not learned):
// meters-scale slots are mapped to roughly unit range so the GAT trains at
// ordinary learning rates. Slot order matches feature_slot_names().
struct SlotAffine {
    double offset, inv_scale;
};

inline const std::array<SlotAffine, kNumNodeFeatures + 1>& feature_affines() {
    static const std::array<SlotAffine, kNumNodeFeatures + 1> a = {{
        {0.0, 1.0},        // ball_carrier
        {0.0, 1.0},        // teammate_of_carrier
        {0.0, 1.0},        // goalkeeper
        {0.0, 1.0},        // goal
        {52.5, 1 / 52.5},  // pos_x
        {34.0, 1 / 34.0},  // pos_y
        {0.0, 1 / 6.0},    // vel_x
        {0.0, 1 / 6.0},    // vel_y
        {0.0, 1 / 6.0},    // speed
        {0.0, 1 / 3.0},    // acceleration
        {50.0, 1 / 50.0},  // goal_distance
        {0.0, 1.0},        // goal_angle_sin
        {0.0, 1.0},        // goal_angle_cos
        {0.0, 1 / 2.0},    // ball_height
        {25.0, 1 / 25.0},  // ball_distance
        {0.0, 1.0},        // ball_angle_sin
        {0.0, 1.0},        // ball_angle_cos
        {0.0, 1.0},        // carrier_vel_sin
        {0.0, 1.0},        // carrier_vel_cos
        {10.0, 1 / 10.0},  // nearest_opp_distance
        {0.0, 1 / 3.0},    // opp_within_3m
        {5.0, 1 / 5.0},    // opp_goal_side
        {0.0, 1 / 3.0},    // opp_in_triangle
        {10.0, 1 / 10.0},  // passline_opp_distance
        {0.0, 1 / 3.0},    // passline_corridor_count
        {0.0, 1.0},        // action_indicator
    }};
    return a;
}

inline GraphSample normalized_features(const GraphSample& g) {
    GraphSample out = g;
    const auto& affine = feature_affines();
    for (int i = 0; i < g.num_nodes(); ++i)
        for (int s = 0; s < g.num_features; ++s)
            out.feature(i, s) = (g.feature(i, s) - affine[s].offset) * affine[s].inv_scale;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        out.edge_features[2 * e] = (g.edge_features[2 * e] - 25.0) / 25.0;
    return out;
}

inline nn::Tape::Var node_logits(nn::Tape& tape, TaskModel& m, const GraphSample& g) {
    const GraphSample ng = normalized_features(g);
    const auto h = nn::gat_forward(tape, m.store, m.spec, ng);
    return nn::mlp_forward(tape, m.store, "head", h);
}

}  // namespace detail

// a1: selection distribution over V+ (teammates + target goal).
inline nn::Tape::Var head_action_selection(nn::Tape& tape, TaskModel& m, const GraphSample& g) {
    return tape.masked_softmax(detail::node_logits(tape, m, g), g.mask_teammates);
}

// b1: per-node success probability of passing to that node.
inline nn::Tape::Var head_pass_success(nn::Tape& tape, TaskModel& m, const GraphSample& g) {
    return tape.sigmoid(detail::node_logits(tape, m, g));
}

// b2: single blocking probability from mean-pooled embeddings.
inline nn::Tape::Var head_shot_blocking(nn::Tape& tape, TaskModel& m, const GraphSample& g) {
    const GraphSample ng = detail::normalized_features(g);
    const auto h = nn::gat_forward(tape, m.store, m.spec, ng);
    const auto pooled = tape.mean_rows(h);
    return tape.sigmoid(nn::mlp_forward(tape, m.store, "head", pooled));
}

// c1/c2: two sigmoids per node — column 0 conditions on success, 1 on failure.
inline nn::Tape::Var head_goal_probabilities(nn::Tape& tape, TaskModel& m, const GraphSample& g) {
    return tape.sigmoid(detail::node_logits(tape, m, g));
}

// d1: responsibility softmax over V- on a conditioned graph; the goalkeeper is
// masked out when the conditioned action is a shot.
inline nn::Tape::Var head_responsibility(nn::Tape& tape, TaskModel& m, const GraphSample& g,
                                         bool exclude_goalkeeper) {
    std::vector<char> mask = g.mask_defenders;
    if (exclude_goalkeeper)
        for (int i = 0; i < g.num_nodes(); ++i)
            if (g.is_goalkeeper[i]) mask[i] = 0;
    bool any = false;
    for (char c : mask) any |= c != 0;
    if (!any) throw std::runtime_error("head_responsibility: all defenders masked");
    return tape.masked_softmax(detail::node_logits(tape, m, g), mask);
}

// --- dataset assembly -------------------------------------------------------

struct ActionDataset {
    Pitch pitch;
    std::vector<GraphSample> graphs;     // one per action
    std::vector<ActionInstance> actions; // aligned with graphs
    std::vector<int> match_of;           // aligned match index
    std::vector<std::string> match_ids;
};

inline ActionDataset build_action_dataset(const std::vector<MatchData>& matches) {
    ActionDataset d;
    if (!matches.empty()) d.pitch = matches[0].pitch;
    for (const auto& m : matches) {
        const int mi = static_cast<int>(d.match_ids.size());
        d.match_ids.push_back(m.match_id);
        auto actions = build_action_instances(m.events, m.snapshots, m.players);
        for (auto& a : actions) {
            d.graphs.push_back(build_graph(a, m.pitch, m.players));
            d.actions.push_back(std::move(a));
            d.match_of.push_back(mi);
        }
    }
    return d;
}

struct TaskSample {
    int action = -1;       // index into ActionDataset
    int target_node = -1;  // executed option (a1, b1, c1, c2) or true receiver (d1)
    int option_node = -1;  // conditioned option node for d1
    double label = 0.0;    // binary tasks
    int slot = 0;          // outcome column for c1/c2
    bool shot = false;     // goalkeeper masking for d1
};

namespace detail {

inline int node_index(const GraphSample& g, const std::string& id) {
    for (int i = 0; i < g.num_nodes(); ++i)
        if (g.node_ids[i] == id) return i;
    return -1;
}

inline bool trainable_action(const EventRecord& e) {
    if (e.action_type == ActionType::FoulWon) return false;
    if (e.is_shot_like() && e.action_type == ActionType::SetPiece) return false;  // penalty
    return e.action_type == ActionType::Pass || e.action_type == ActionType::Dribble ||
           e.action_type == ActionType::Shot || e.action_type == ActionType::SetPiece;
}

inline int executed_option_node(const ActionDataset& d, int i) {
    const GraphSample& g = d.graphs[i];
    const ActionInstance& a = d.actions[i];
    if (a.intended_receiver_id == kGoalToken) return g.target_goal_index;
    return node_index(g, a.intended_receiver_id);
}

}  // namespace detail

inline std::vector<TaskSample> build_task_samples(TaskKind kind, const ActionDataset& d) {
    std::vector<TaskSample> out;
    for (int i = 0; i < static_cast<int>(d.actions.size()); ++i) {
        const ActionInstance& a = d.actions[i];
        const EventRecord& e = a.event;
        if (!detail::trainable_action(e)) continue;
        const bool shot = e.is_shot_like();
        TaskSample s;
        s.action = i;
        switch (kind) {
            case TaskKind::ActionSelection:
                s.target_node = detail::executed_option_node(d, i);
                break;
            case TaskKind::PassSuccess:
                if (shot) continue;
                s.target_node = detail::executed_option_node(d, i);
                s.label = a.outcome_O;
                break;
            case TaskKind::ShotBlocking:
                if (!shot) continue;
                s.label = (e.shot_flags && e.shot_flags->blocked) ? 1.0 : 0.0;
                break;
            case TaskKind::GoalScoring:
            case TaskKind::GoalConceding:
                s.target_node = detail::executed_option_node(d, i);
                s.slot = a.outcome_O == 1 ? 0 : 1;
                s.label = kind == TaskKind::GoalScoring ? (a.return_G == 1 ? 1.0 : 0.0)
                                                        : (a.return_G == -1 ? 1.0 : 0.0);
                break;
            case TaskKind::Responsibility: {
                // failed passes with a defensive touch, and blocked shots
                const bool failed_pass = !shot && a.outcome_O == 0 && e.interceptor_id &&
                                         e.failure_cause &&
                                         *e.failure_cause == FailureCause::DefensiveAction;
                const bool blocked_shot = shot && e.shot_flags && e.shot_flags->blocked &&
                                          e.interceptor_id;
                if (!failed_pass && !blocked_shot) continue;
                s.option_node = detail::executed_option_node(d, i);
                s.target_node = detail::node_index(d.graphs[i], *e.interceptor_id);
                s.shot = shot;
                if (s.target_node < 0)
                    throw std::runtime_error("responsibility sample: interceptor not in graph");
                break;
            }
            default:
                throw std::runtime_error("build_task_samples: not a graph task");
        }
        if (kind != TaskKind::ShotBlocking && s.target_node < 0)
            throw std::runtime_error("task sample: executed option not found in graph");
        out.push_back(s);
    }
    return out;
}

// Unblocked shots in the normalized attack frame, for the UxG fit.
inline std::vector<ShotRecord> build_shot_records(const ActionDataset& d) {
    std::vector<ShotRecord> out;
    for (int i = 0; i < static_cast<int>(d.actions.size()); ++i) {
        const ActionInstance& a = d.actions[i];
        const EventRecord& e = a.event;
        if (e.action_type != ActionType::Shot || !e.shot_flags || e.shot_flags->blocked) continue;
        const GraphSample& g = d.graphs[i];
        const Vec2 pos{g.feature(g.actor_index, 4), g.feature(g.actor_index, 5)};
        ShotRecord r;
        r.features = shot_features(pos, d.pitch, true, false, a.snapshot.ball.height > 1.0);
        r.goal = e.shot_flags->is_goal ? 1 : 0;
        out.push_back(r);
    }
    return out;
}

// Passes taken from threatening locations become proxy blocked shots for b2
// training: UxG above 0.05 and at least one defender inside the actor's
// goalposts triangle (node feature slot 22 of the actor).
inline std::vector<TaskSample> augment_shot_dataset(const ActionDataset& d, const UxgModel& uxg) {
    std::vector<TaskSample> out;
    for (int i = 0; i < static_cast<int>(d.actions.size()); ++i) {
        const EventRecord& e = d.actions[i].event;
        if (e.action_type != ActionType::Pass) continue;
        const GraphSample& g = d.graphs[i];
        const Vec2 pos{g.feature(g.actor_index, 4), g.feature(g.actor_index, 5)};
        if (uxg.predict(pos, d.pitch, true) <= 0.05) continue;
        if (g.feature(g.actor_index, 22) < 1.0) continue;
        TaskSample s;
        s.action = i;
        s.label = 1.0;  // labeled blocked
        out.push_back(s);
    }
    return out;
}

// --- training ----------------------------------------------------------------

namespace detail {

inline nn::Tape::Var sample_loss(nn::Tape& tape, TaskModel& m, const ActionDataset& d,
                                 const TaskSample& s) {
    const GraphSample& g = d.graphs[s.action];
    switch (m.kind) {
        case TaskKind::ActionSelection:
            return tape.neg_log_pick(head_action_selection(tape, m, g), s.target_node, 0);
        case TaskKind::PassSuccess:
            return tape.bce_pick(head_pass_success(tape, m, g), s.target_node, 0, s.label);
        case TaskKind::ShotBlocking:
            return tape.bce_pick(head_shot_blocking(tape, m, g), 0, 0, s.label);
        case TaskKind::GoalScoring:
        case TaskKind::GoalConceding:
            return tape.bce_pick(head_goal_probabilities(tape, m, g), s.target_node, s.slot,
                                 s.label);
        case TaskKind::Responsibility: {
            const GraphSample cg = condition_on_action(g, s.option_node);
            return tape.neg_log_pick(head_responsibility(tape, m, cg, s.shot), s.target_node, 0);
        }
        default:
            throw std::runtime_error("sample_loss: not a graph task");
    }
}

template <typename T>
inline void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.uniform_index(i)]);
}

}  // namespace detail

// Scalar prediction for binary tasks (probability of the positive slot).
inline double predict_binary(TaskModel& m, const ActionDataset& d, const TaskSample& s) {
    nn::Tape tape;
    const GraphSample& g = d.graphs[s.action];
    switch (m.kind) {
        case TaskKind::PassSuccess:
            return tape.value(head_pass_success(tape, m, g)).at(s.target_node, 0);
        case TaskKind::ShotBlocking:
            return tape.value(head_shot_blocking(tape, m, g)).v[0];
        case TaskKind::GoalScoring:
        case TaskKind::GoalConceding:
            return tape.value(head_goal_probabilities(tape, m, g)).at(s.target_node, s.slot);
        default:
            throw std::runtime_error("predict_binary: not a binary task");
    }
}

// Candidate distribution for ranking tasks, in node order over the active
// mask; also returns the index of the true candidate within that order.
inline std::pair<std::vector<double>, int> predict_distribution(TaskModel& m,
                                                                const ActionDataset& d,
                                                                const TaskSample& s) {
    nn::Tape tape;
    const GraphSample& g = d.graphs[s.action];
    nn::Tape::Var probs;
    std::vector<char> mask;
    if (m.kind == TaskKind::ActionSelection) {
        probs = head_action_selection(tape, m, g);
        mask = g.mask_teammates;
    } else if (m.kind == TaskKind::Responsibility) {
        const GraphSample cg = condition_on_action(g, s.option_node);
        probs = head_responsibility(tape, m, cg, s.shot);
        mask = cg.mask_defenders;
        if (s.shot)
            for (int i = 0; i < cg.num_nodes(); ++i)
                if (cg.is_goalkeeper[i]) mask[i] = 0;
    } else {
        throw std::runtime_error("predict_distribution: not a ranking task");
    }
    std::vector<double> p;
    int true_index = -1;
    for (int i = 0; i < g.num_nodes(); ++i) {
        if (!mask[i]) continue;
        if (i == s.target_node) true_index = static_cast<int>(p.size());
        p.push_back(tape.value(probs).at(i, 0));
    }
    return {p, true_index};
}

struct TrainedTask {
    TaskModel model;
    nlohmann::json metrics;
};

inline nlohmann::json evaluate_task(TaskModel& m, const ActionDataset& d,
                                    const std::vector<TaskSample>& samples) {
    nlohmann::json j;
    j["samples"] = samples.size();
    if (samples.empty()) return j;
    if (is_multiclass(m.kind)) {
        std::vector<std::vector<double>> probs;
        std::vector<int> truth;
        for (const auto& s : samples) {
            auto [p, t] = predict_distribution(m, d, s);
            if (t < 0) continue;
            probs.push_back(std::move(p));
            truth.push_back(t);
        }
        const auto mm = multiclass_metrics(probs, truth);
        j["accuracy"] = mm.accuracy;
        j["cross_entropy"] = mm.cross_entropy;
        j["mrr"] = mm.mrr;
    } else {
        std::vector<double> scores;
        std::vector<int> labels;
        for (const auto& s : samples) {
            scores.push_back(predict_binary(m, d, s));
            labels.push_back(s.label >= 0.5 ? 1 : 0);
        }
        const auto bm = binary_metrics(scores, labels);
        j["f1"] = bm.f1;
        if (bm.auc) j["auc"] = *bm.auc;
        j["brier"] = bm.brier;
    }
    return j;
}

// Match-level split, early stopping on validation loss, best-epoch restore.
// `augmented` samples join the training set only (never validation/metrics).
// Thrown when a persisted bundle was produced under a different feature schema.
struct SchemaMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a task's loss goes non-finite during training.
struct DivergentLossError : std::runtime_error {
    std::string task;
    explicit DivergentLossError(TaskKind kind)
        : std::runtime_error(std::string("divergent loss (NaN) in task ") + to_string(kind)),
          task(to_string(kind)) {}
};

inline TrainedTask train_task(TaskKind kind, const ActionDataset& d,
                              const std::vector<TaskSample>& samples,
                              const std::vector<TaskSample>& augmented, const TrainConfig& cfg) {
    if (samples.empty())
        throw std::runtime_error(std::string("train_task: empty dataset for task ") +
                                 to_string(kind));
    Rng rng = Rng::seeded(cfg.seed).fork(static_cast<std::uint64_t>(kind) + 101);

    std::vector<int> match_ids;
    for (const auto& s : samples) {
        const int m = d.match_of[s.action];
        if (std::find(match_ids.begin(), match_ids.end(), m) == match_ids.end())
            match_ids.push_back(m);
    }
    detail::shuffle(match_ids, rng);
    const std::size_t n_val =
        match_ids.size() > 1
            ? std::max<std::size_t>(1, static_cast<std::size_t>(
                                           cfg.validation_fraction *
                                           static_cast<double>(match_ids.size())))
            : 0;
    std::vector<char> is_val_match(d.match_ids.size(), 0);
    for (std::size_t i = 0; i < n_val; ++i) is_val_match[match_ids[i]] = 1;

    std::vector<TaskSample> train, val;
    for (const auto& s : samples)
        (is_val_match[d.match_of[s.action]] ? val : train).push_back(s);
    for (const auto& s : augmented)
        if (!is_val_match[d.match_of[s.action]]) train.push_back(s);
    if (train.empty())
        throw std::runtime_error(std::string("train_task: empty training split for task ") +
                                 to_string(kind));

    TrainedTask out;
    out.model = make_task_model(kind, cfg);
    out.model.store.glorot_init(rng);
    nn::AdamOptimizer opt({cfg.learning_rate, 0.9, 0.999, 1e-8});

    auto epoch_loss = [&](const std::vector<TaskSample>& set) {
        double total = 0.0;
        for (const auto& s : set) {
            nn::Tape tape;
            total += tape.value(detail::sample_loss(tape, out.model, d, s)).v[0];
        }
        return set.empty() ? 0.0 : total / static_cast<double>(set.size());
    };

    double best_val = std::numeric_limits<double>::infinity();
    std::map<std::string, nn::Tensor> best_params = out.model.store.params;
    int best_epoch = 0, stale = 0, epochs_run = 0, decays_left = cfg.lr_decays;
    std::vector<int> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        detail::shuffle(order, rng);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            out.model.store.zero_grads();
            for (std::size_t k = start; k < end; ++k) {
                nn::Tape tape;
                const auto loss = detail::sample_loss(tape, out.model, d, train[order[k]]);
                tape.backward(tape.scale(loss, 1.0 / static_cast<double>(end - start)));
            }
            opt.step(out.model.store);
        }
        epochs_run = epoch;
        const double vloss = val.empty() ? epoch_loss(train) : epoch_loss(val);
        if (!std::isfinite(vloss)) throw DivergentLossError(kind);
        if (vloss < best_val - 1e-6) {
            best_val = vloss;
            best_params = out.model.store.params;
            best_epoch = epoch;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            if (decays_left <= 0) break;
            --decays_left;
            out.model.store.params = best_params;
            opt.set_learning_rate(opt.learning_rate() * 0.5);
            stale = 0;
        }
    }
    out.model.store.params = best_params;

    out.metrics = evaluate_task(out.model, d, val.empty() ? train : val);
    out.metrics["task"] = to_string(kind);
    out.metrics["val_loss"] = best_val;
    out.metrics["epochs"] = epochs_run;
    out.metrics["best_epoch"] = best_epoch;
    out.metrics["train_samples"] = train.size();
    out.metrics["val_samples"] = val.size();
    return out;
}

// --- model bundle -------------------------------------------------------------

struct ModelBundle {
    std::map<TaskKind, TaskModel> tasks;
    UxgModel uxg;
    nlohmann::json manifest;

    TaskModel& task(TaskKind k) {
        auto it = tasks.find(k);
        if (it == tasks.end())
            throw std::runtime_error(std::string("bundle missing task ") + to_string(k));
        return it->second;
    }
};

// Full training pipeline: the UxG logistic model is fitted first (the shot
// augmentation rule depends on it), then the six graph tasks.
struct TrainResult {
    ModelBundle bundle;
    nlohmann::json metrics;
};

inline TrainResult train_bundle(const ActionDataset& d, const TrainConfig& cfg,
                                std::optional<TaskKind> only = std::nullopt) {
    TrainResult out;
    const auto shots = build_shot_records(d);
    out.bundle.uxg = fit_uxg(shots);
    auto per_task = nlohmann::json::array();
    per_task.push_back({{"task", "uxg"},
                        {"samples", shots.size()},
                        {"converged", out.bundle.uxg.converged},
                        {"iterations", out.bundle.uxg.iterations}});
    for (const TaskKind kind : graph_tasks()) {
        if (only && kind != *only) continue;
        const auto samples = build_task_samples(kind, d);
        const auto augmented = kind == TaskKind::ShotBlocking
                                   ? augment_shot_dataset(d, out.bundle.uxg)
                                   : std::vector<TaskSample>{};
        auto trained = train_task(kind, d, samples, augmented, cfg);
        per_task.push_back(trained.metrics);
        out.bundle.tasks.emplace(kind, std::move(trained.model));
    }
    out.metrics["tasks"] = per_task;
    out.metrics["matches"] = d.match_ids.size();
    out.metrics["actions"] = d.actions.size();
    out.bundle.manifest["train_config"] = {{"learning_rate", cfg.learning_rate},
                                           {"batch_size", cfg.batch_size},
                                           {"max_epochs", cfg.max_epochs},
                                           {"patience", cfg.patience},
                                           {"validation_fraction", cfg.validation_fraction},
                                           {"seed", cfg.seed},
                                           {"hidden", cfg.hidden},
                                           {"heads", cfg.heads},
                                           {"edge_proj", cfg.edge_proj},
                                           {"head_hidden", cfg.head_hidden},
                                           {"lr_decays", cfg.lr_decays}};
    return out;
}

inline void save_bundle(const std::string& dir, const ModelBundle& bundle) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto tasks_json = nlohmann::json::array();
    for (const auto& [kind, model] : bundle.tasks) {
        nlohmann::json echo = {{"task", to_string(kind)},
                               {"in_dim", model.spec.in_dim},
                               {"hidden", model.spec.hidden},
                               {"heads", model.spec.heads},
                               {"edge_proj", model.spec.edge_proj},
                               {"head_hidden", model.head_hidden},
                               {"head_out", head_out_dim(kind)}};
        save_checkpoint((fs::path(dir) / (std::string(to_string(kind)) + ".ckpt")).string(),
                        model.store, echo);
        tasks_json.push_back(to_string(kind));
    }
    std::ofstream((fs::path(dir) / "uxg.json").string()) << bundle.uxg.to_json().dump(2) << "\n";
    nlohmann::json manifest = bundle.manifest;
    manifest["schema_id"] = "defcon.bundle";
    manifest["feature_schema_hash"] = feature_schema_hash();
    manifest["tasks"] = tasks_json;
    std::ofstream((fs::path(dir) / "bundle.json").string()) << manifest.dump(2) << "\n";
}

inline ModelBundle load_bundle(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream mf((fs::path(dir) / "bundle.json").string());
    if (!mf) throw std::runtime_error("cannot open bundle manifest in " + dir);
    ModelBundle bundle;
    bundle.manifest = nlohmann::json::parse(mf);
    if (bundle.manifest.at("feature_schema_hash").get<std::uint64_t>() != feature_schema_hash())
        throw SchemaMismatchError("bundle feature schema hash mismatch in " + dir);
    for (const auto& name : bundle.manifest.at("tasks")) {
        const TaskKind kind = task_from_string(name.get<std::string>());
        auto ckpt =
            load_checkpoint((fs::path(dir) / (name.get<std::string>() + ".ckpt")).string());
        TaskModel m;
        m.kind = kind;
        m.spec.in_dim = ckpt.config.at("in_dim").get<int>();
        m.spec.hidden = ckpt.config.at("hidden").get<int>();
        m.spec.heads = ckpt.config.at("heads").get<int>();
        m.spec.edge_proj = ckpt.config.at("edge_proj").get<int>();
        m.head_hidden = ckpt.config.at("head_hidden").get<int>();
        m.store = std::move(ckpt.store);
        bundle.tasks.emplace(kind, std::move(m));
    }
    std::ifstream uf((fs::path(dir) / "uxg.json").string());
    if (!uf) throw std::runtime_error("cannot open uxg.json in " + dir);
    bundle.uxg = UxgModel::from_json(nlohmann::json::parse(uf));
    return bundle;
}

}  // namespace defcon
