#include "tensor/checkpoint.hpp"

#include <algorithm>
#include <fstream>

namespace taskgrid::tensor {

using nlohmann::json;

json params_to_json(const ParamMap& params, const json& meta) {
    json out;
    out["format"] = "taskgrid-params";
    out["version"] = kCheckpointVersion;
    out["meta"] = meta.is_null() ? json::object() : meta;
    json& p = out["params"] = json::object();
    for (const auto& [name, t] : params) {
        p[name] = {{"shape", t.shape()},
                   {"values", std::vector<double>(t.values().begin(), t.values().end())}};
    }
    return out;
}

void load_params_json(const json& doc, ParamMap& params) {
    if (doc.value("format", "") != "taskgrid-params") {
        throw CheckpointError("not a parameter checkpoint");
    }
    const int version = doc.value("version", -1);
    if (version != kCheckpointVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const json& stored = doc.at("params");
    for (auto& [name, t] : params) {
        if (!stored.contains(name)) throw CheckpointError("checkpoint lacks parameter " + name);
        const json& entry = stored.at(name);
        const auto shape = entry.at("shape").get<Shape>();
        if (shape != t.shape()) {
            throw CheckpointError("parameter " + name + " has shape " + shape_string(shape) +
                                  ", expected " + shape_string(t.shape()));
        }
        const auto values = entry.at("values").get<std::vector<double>>();
        if (values.size() != t.size()) throw CheckpointError("parameter " + name + " is truncated");
        std::copy(values.begin(), values.end(), t.mutable_values().begin());
    }
}

void save_checkpoint(const std::string& path, const ParamMap& params, const json& meta) {
    std::ofstream out(path);
    if (!out) throw CheckpointError("cannot write checkpoint " + path);
    out << params_to_json(params, meta).dump() << '\n';
}

json read_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CheckpointError("cannot read checkpoint " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw CheckpointError("malformed checkpoint " + path + ": " + e.what());
    }
}

} // namespace taskgrid::tensor
