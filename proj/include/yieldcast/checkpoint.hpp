#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "yieldcast/calendar.hpp"
#include "yieldcast/errors.hpp"
#include "yieldcast/features.hpp"
#include "yieldcast/nn.hpp"
#include "yieldcast/serde.hpp"

namespace yieldcast {

// Everything needed to reproduce predictions: the trained network plus the
// feature/target scaler and the featurization settings it was trained with.
// Binary layout is documented in docs/checkpoint-format.md.
struct Checkpoint {
    Network net;  // loaded in eval mode
    Scaler scaler;
    CropKind crop = CropKind::Corn;
    std::uint64_t seed = 0;
    GddConfig gdd;
    WindowAnchor anchor = WindowAnchor::PlantingStart;
};

inline constexpr char kCheckpointMagic[8] = {'Y', 'C', 'K', 'P', 'T', '0', '0', '1'};

inline void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path)
{
    Json tensors = Json::array();
    long total = 0;
    visit_params(const_cast<ParamSet&>(cp.net.params),
                 [&](const std::string& name, double*, long size, bool) {
                     tensors.push_back(Json{{"name", name}, {"size", size}});
                     total += size;
                 });

    const Json header{{"format_version", 1},
                      {"arch", arch_to_json(cp.net.arch)},
                      {"crop", std::string(crop_name(cp.crop))},
                      {"seed", cp.seed},
                      {"scaler", scaler_to_json(cp.scaler)},
                      {"gdd", gdd_to_json(cp.gdd)},
                      {"window_anchor", std::string(anchor_name(cp.anchor))},
                      {"tensors", tensors},
                      {"param_count", total}};
    const std::string header_text = header.dump();

    std::ofstream out = open_output(path);
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    const std::uint64_t header_len = header_text.size();
    out.write(reinterpret_cast<const char*>(&header_len), sizeof header_len);
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    visit_params(const_cast<ParamSet&>(cp.net.params),
                 [&](const std::string&, double* data, long size, bool) {
                     out.write(reinterpret_cast<const char*>(data),
                               static_cast<std::streamsize>(size * sizeof(double)));
                 });
    if (!out) {
        throw IoError("failed writing checkpoint: " + path.string());
    }
}

[[nodiscard]] inline Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open checkpoint: " + path.string());
    }
    char magic[sizeof kCheckpointMagic];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
        throw ParseError(path.string() + ": not a checkpoint file (bad magic)");
    }
    std::uint64_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof header_len);
    if (!in || header_len > (1u << 24)) {
        throw ParseError(path.string() + ": corrupt checkpoint header length");
    }
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (!in) {
        throw ParseError(path.string() + ": truncated checkpoint header");
    }

    Json header;
    try {
        header = Json::parse(header_text);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": checkpoint header: " + e.what());
    }
    if (header.at("format_version").get<int>() != 1) {
        throw ParseError(path.string() + ": unsupported checkpoint format version");
    }

    Checkpoint cp;
    cp.net = make_network(arch_from_json(header.at("arch")));
    cp.net.mode = Mode::Eval;
    cp.crop = crop_from_name(header.at("crop").get<std::string>());
    cp.seed = header.at("seed").get<std::uint64_t>();
    cp.scaler = scaler_from_json(header.at("scaler"));
    cp.gdd = gdd_from_json(header.at("gdd"));
    cp.anchor = anchor_from_name(header.at("window_anchor").get<std::string>());

    const Json& tensors = header.at("tensors");
    std::size_t index = 0;
    visit_params(cp.net.params, [&](const std::string& name, double* data, long size, bool) {
        if (index >= tensors.size()) {
            throw SchemaError(path.string() + ": checkpoint tensor list too short");
        }
        const Json& t = tensors[index++];
        if (t.at("name").get<std::string>() != name || t.at("size").get<long>() != size) {
            throw SchemaError(path.string() + ": checkpoint tensor mismatch at '" + name + "'");
        }
        in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(size * sizeof(double)));
        if (!in) {
            throw ParseError(path.string() + ": truncated checkpoint payload at '" + name + "'");
        }
    });
    if (index != tensors.size()) {
        throw SchemaError(path.string() + ": checkpoint tensor list too long");
    }
    char extra;
    if (in.read(&extra, 1)) {
        throw ParseError(path.string() + ": trailing bytes after checkpoint payload");
    }
    return cp;
}

}  // namespace yieldcast
