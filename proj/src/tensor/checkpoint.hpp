#pragma once

#include "tensor/tensor.hpp"

#include <map>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>

namespace taskgrid::tensor {

inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ParamMap = std::map<std::string, Tensor>;

// {"format":"taskgrid-params","version":1,"meta":{...},"params":{name:{shape,values}}}
nlohmann::json params_to_json(const ParamMap& params, const nlohmann::json& meta = {});
// Copies stored values into the matching tensors of `params`. Every tensor in
// `params` must be present with an identical shape.
void load_params_json(const nlohmann::json& doc, ParamMap& params);

void save_checkpoint(const std::string& path, const ParamMap& params, const nlohmann::json& meta = {});
nlohmann::json read_checkpoint(const std::string& path);

} // namespace taskgrid::tensor
