#pragma once

#include <string>
#include <vector>

#include "defcon/graph.hpp"
#include "defcon/nn.hpp"

namespace defcon::nn {

// Two-layer graph attention encoder with edge features in the attention score:
//   score(u->v) = LeakyReLU(a_src . W h_u + a_dst . W h_v + a_e . (W_e e_uv)),
//   attention = softmax over incoming edges per node (self-loops included),
//   out per head = ELU(sum_u alpha_uv W h_u),
// heads concatenated on layer 1 and averaged on layer 2.
struct AttentionLayerSpec {
    int in_dim = 0;
    int out_dim = 0;  // per head
    int heads = 4;
    int edge_dim = kNumEdgeFeatures;
    int edge_proj = 8;
    double negative_slope = 0.2;
    bool concat_heads = true;
};

struct GatSpec {
    int in_dim = kNumNodeFeatures;
    int hidden = 32;  // total width between and after layers
    int heads = 4;
    int edge_proj = 8;
    double negative_slope = 0.2;

    AttentionLayerSpec layer1() const {
        return {in_dim, hidden / heads, heads, kNumEdgeFeatures, edge_proj, negative_slope, true};
    }
    AttentionLayerSpec layer2() const {
        return {hidden, hidden, heads, kNumEdgeFeatures, edge_proj, negative_slope, false};
    }
};

inline void register_attention_params(ParamStore& store, const std::string& prefix,
                                      const AttentionLayerSpec& spec) {
    for (int h = 0; h < spec.heads; ++h) {
        const std::string p = prefix + ".h" + std::to_string(h);
        store.add(p + ".W", spec.in_dim, spec.out_dim);
        store.add(p + ".a_src", spec.out_dim, 1);
        store.add(p + ".a_dst", spec.out_dim, 1);
        store.add(p + ".We", spec.edge_dim, spec.edge_proj);
        store.add(p + ".a_e", spec.edge_proj, 1);
    }
}

// Edge lists with self-loops appended (distance 0, same-team 1).
struct EdgeIndex {
    std::vector<int> src;
    std::vector<int> dst;
    Tensor edge_features;  // (|E| + |V|) x 2
};

inline EdgeIndex make_edge_index(const GraphSample& g) {
    const int nv = g.num_nodes();
    const int ne = static_cast<int>(g.edges.size());
    EdgeIndex idx;
    idx.src.reserve(ne + nv);
    idx.dst.reserve(ne + nv);
    idx.edge_features = Tensor(ne + nv, kNumEdgeFeatures);
    for (int e = 0; e < ne; ++e) {
        idx.src.push_back(g.edges[e].first);
        idx.dst.push_back(g.edges[e].second);
        idx.edge_features.at(e, 0) = g.edge_features[2 * e];
        idx.edge_features.at(e, 1) = g.edge_features[2 * e + 1];
    }
    for (int v = 0; v < nv; ++v) {
        idx.src.push_back(v);
        idx.dst.push_back(v);
        idx.edge_features.at(ne + v, 0) = 0.0;
        idx.edge_features.at(ne + v, 1) = 1.0;
    }
    return idx;
}

inline Tape::Var attention_layer_forward(Tape& tape, ParamStore& store, const std::string& prefix,
                                         const AttentionLayerSpec& spec, Tape::Var x,
                                         Tape::Var edge_feats, const EdgeIndex& idx,
                                         int num_nodes) {
    std::vector<Tape::Var> head_outputs;
    head_outputs.reserve(spec.heads);
    for (int h = 0; h < spec.heads; ++h) {
        const std::string p = prefix + ".h" + std::to_string(h);
        const auto W = tape.param(store, p + ".W");
        const auto z = tape.matmul(x, W);
        const auto zsrc = tape.matmul(z, tape.param(store, p + ".a_src"));
        const auto zdst = tape.matmul(z, tape.param(store, p + ".a_dst"));
        const auto eproj = tape.matmul(edge_feats, tape.param(store, p + ".We"));
        const auto escore = tape.matmul(eproj, tape.param(store, p + ".a_e"));
        const auto raw = tape.add(tape.add(tape.gather_rows(zsrc, idx.src),
                                           tape.gather_rows(zdst, idx.dst)),
                                  escore);
        const auto scores = tape.leaky_relu(raw, spec.negative_slope);
        const auto alpha = tape.segment_softmax(scores, idx.dst, num_nodes);
        const auto agg = tape.attention_aggregate(alpha, z, idx.src, idx.dst, num_nodes);
        head_outputs.push_back(tape.elu(agg));
    }
    if (spec.concat_heads) return tape.concat_cols(head_outputs);
    Tape::Var sum = head_outputs[0];
    for (std::size_t h = 1; h < head_outputs.size(); ++h) sum = tape.add(sum, head_outputs[h]);
    return tape.scale(sum, 1.0 / static_cast<double>(spec.heads));
}

inline void register_gat_params(ParamStore& store, const GatSpec& spec) {
    register_attention_params(store, "gat.l1", spec.layer1());
    register_attention_params(store, "gat.l2", spec.layer2());
}

// Node embeddings H (|V| x hidden) for one graph.
inline Tape::Var gat_forward(Tape& tape, ParamStore& store, const GatSpec& spec,
                             const GraphSample& g) {
    const EdgeIndex idx = make_edge_index(g);
    const int nv = g.num_nodes();
    Tensor X(nv, g.num_features);
    X.v = g.node_features;
    const auto x = tape.input(std::move(X));
    const auto e = tape.input(idx.edge_features);
    const auto h1 = attention_layer_forward(tape, store, "gat.l1", spec.layer1(), x, e, idx, nv);
    return attention_layer_forward(tape, store, "gat.l2", spec.layer2(), h1, e, idx, nv);
}

// Two-layer MLP head: ELU(X W1 + b1) W2 + b2.
inline void register_mlp_params(ParamStore& store, const std::string& prefix, int in_dim,
                                int hidden, int out_dim) {
    store.add(prefix + ".W1", in_dim, hidden);
    store.add(prefix + ".bias1", 1, hidden);
    store.add(prefix + ".W2", hidden, out_dim);
    store.add(prefix + ".bias2", 1, out_dim);
}

inline Tape::Var mlp_forward(Tape& tape, ParamStore& store, const std::string& prefix,
                             Tape::Var x) {
    const auto h = tape.elu(tape.add_bias(tape.matmul(x, tape.param(store, prefix + ".W1")),
                                          tape.param(store, prefix + ".bias1")));
    return tape.add_bias(tape.matmul(h, tape.param(store, prefix + ".W2")),
                         tape.param(store, prefix + ".bias2"));
}

}  // namespace defcon::nn
