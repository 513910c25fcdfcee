#include "syntab/neural/tensor_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace syntab::neural {

namespace {
constexpr const char* kFormat = "syntab.tensors";
constexpr int kVersion = 1;
}  // namespace

void save_tensors(const std::string& prefix, const std::vector<NamedTensor>& tensors) {
    nlohmann::json manifest;
    manifest["format"] = kFormat;
    manifest["version"] = kVersion;
    manifest["tensors"] = nlohmann::json::array();

    std::ofstream bin(prefix + ".bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw std::runtime_error("save_tensors: cannot open " + prefix + ".bin");
    std::size_t offset = 0;
    for (const NamedTensor& t : tensors) {
        manifest["tensors"].push_back({{"name", t.name},
                                       {"rows", t.value.rows},
                                       {"cols", t.value.cols},
                                       {"offset", offset}});
        bin.write(reinterpret_cast<const char*>(t.value.data.data()),
                  static_cast<std::streamsize>(t.value.size() * sizeof(double)));
        offset += t.value.size();
    }
    bin.close();
    if (!bin) throw std::runtime_error("save_tensors: write failed for " + prefix + ".bin");

    std::ofstream js(prefix + ".json", std::ios::trunc);
    if (!js) throw std::runtime_error("save_tensors: cannot open " + prefix + ".json");
    js << manifest.dump(2) << "\n";
    if (!js) throw std::runtime_error("save_tensors: write failed for " + prefix + ".json");
}

std::vector<NamedTensor> load_tensors(const std::string& prefix) {
    std::ifstream js(prefix + ".json");
    if (!js) throw std::runtime_error("load_tensors: cannot open " + prefix + ".json");
    nlohmann::json manifest = nlohmann::json::parse(js);
    if (manifest.value("format", "") != kFormat) {
        throw std::runtime_error("load_tensors: unrecognized format tag in " + prefix + ".json");
    }
    if (manifest.value("version", -1) != kVersion) {
        throw std::runtime_error("load_tensors: unsupported version in " + prefix + ".json");
    }

    std::ifstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("load_tensors: cannot open " + prefix + ".bin");
    bin.seekg(0, std::ios::end);
    const std::size_t bytes = static_cast<std::size_t>(bin.tellg());
    bin.seekg(0, std::ios::beg);

    std::vector<NamedTensor> out;
    std::size_t expected = 0;
    for (const auto& entry : manifest.at("tensors")) {
        NamedTensor t;
        t.name = entry.at("name").get<std::string>();
        const auto rows = entry.at("rows").get<std::size_t>();
        const auto cols = entry.at("cols").get<std::size_t>();
        const auto offset = entry.at("offset").get<std::size_t>();
        if (offset != expected) throw std::runtime_error("load_tensors: non-contiguous manifest offsets");
        t.value = Matrix(rows, cols);
        bin.read(reinterpret_cast<char*>(t.value.data.data()),
                 static_cast<std::streamsize>(t.value.size() * sizeof(double)));
        if (!bin) throw std::runtime_error("load_tensors: truncated payload in " + prefix + ".bin");
        expected += t.value.size();
        out.push_back(std::move(t));
    }
    if (bytes != expected * sizeof(double)) {
        throw std::runtime_error("load_tensors: payload length disagrees with manifest");
    }
    return out;
}

}  // namespace syntab::neural
