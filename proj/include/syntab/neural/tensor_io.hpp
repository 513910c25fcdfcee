#pragma once

#include <string>
#include <vector>

#include "syntab/matrix.hpp"

namespace syntab::neural {

struct NamedTensor {
    std::string name;
    Matrix value;
};

// Writes <prefix>.bin (all tensor values as native float64, concatenated in
// list order) and <prefix>.json (format tag, version, and per-tensor name /
// rows / cols / element offset). Loading verifies the tag, the version, and
// that the binary payload length matches the manifest.
void save_tensors(const std::string& prefix, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> load_tensors(const std::string& prefix);

}  // namespace syntab::neural
