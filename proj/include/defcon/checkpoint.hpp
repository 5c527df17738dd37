#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "defcon/graph.hpp"
#include "defcon/nn.hpp"

namespace defcon {

// Checkpoint container: magic + version, a JSON header carrying the schema id,
// feature-slot ordering hash and a training-config echo, then named arrays as
// little-endian 32-bit floats. Loading rejects mismatched schema hashes.
inline constexpr char kCheckpointMagic[8] = {'D', 'F', 'C', 'N', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

inline void save_checkpoint(const std::string& path, const nn::ParamStore& store,
                            const nlohmann::json& config_echo) {
    nlohmann::json header;
    header["schema_id"] = "defcon.checkpoint";
    header["feature_schema_hash"] = feature_schema_hash();
    header["config"] = config_echo;
    auto arrays = nlohmann::json::array();
    for (const auto& [name, t] : store.params)
        arrays.push_back({{"name", name}, {"rows", t.rows}, {"cols", t.cols}});
    header["arrays"] = arrays;
    const std::string hs = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kCheckpointMagic, 8);
    const std::uint32_t version = kCheckpointVersion;
    out.write(reinterpret_cast<const char*>(&version), 4);
    const std::uint32_t hlen = static_cast<std::uint32_t>(hs.size());
    out.write(reinterpret_cast<const char*>(&hlen), 4);
    out.write(hs.data(), hs.size());
    for (const auto& [name, t] : store.params) {
        for (double d : t.v) {
            const float f = static_cast<float>(d);
            out.write(reinterpret_cast<const char*>(&f), 4);
        }
    }
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

struct LoadedCheckpoint {
    nn::ParamStore store;
    nlohmann::json config;
};

inline LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    std::uint32_t version = 0, hlen = 0;
    in.read(reinterpret_cast<char*>(&version), 4);
    in.read(reinterpret_cast<char*>(&hlen), 4);
    if (version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version in " + path);
    std::string hs(hlen, '\0');
    in.read(hs.data(), hlen);
    const nlohmann::json header = nlohmann::json::parse(hs);
    if (header.at("schema_id") != "defcon.checkpoint")
        throw std::runtime_error("unexpected schema id in " + path);
    if (header.at("feature_schema_hash").get<std::uint64_t>() != feature_schema_hash())
        throw std::runtime_error("feature schema hash mismatch in " + path);

    LoadedCheckpoint out;
    out.config = header.value("config", nlohmann::json::object());
    for (const auto& a : header.at("arrays")) {
        nn::Tensor& t = out.store.add(a.at("name").get<std::string>(), a.at("rows").get<int>(),
                                      a.at("cols").get<int>());
        for (double& d : t.v) {
            float f = 0.0f;
            in.read(reinterpret_cast<char*>(&f), 4);
            d = static_cast<double>(f);
        }
    }
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    return out;
}

}  // namespace defcon
