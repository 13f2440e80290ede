#pragma once

#include <string>

#include "editseq/nn/params.hpp"
#include "editseq/vendor_json_fwd.hpp"

namespace editseq::nn {

// Versioned named-array container: values, Adam moments, step counter, and a
// free-form JSON descriptor (model config, provenance).
void save_checkpoint(const std::string& path, const ParamStore<float>& store,
                     const nlohmann::json& descriptor);

struct LoadedCheckpoint {
  ParamStore<float> store;
  nlohmann::json descriptor;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace editseq::nn
