#include "explcorpus/error.hpp"
#include "explcorpus/runner.hpp"

#include "detail/fs_util.hpp"

#include <json.hpp>

namespace explcorpus {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

fs::path checkpoint_path(const fs::path& dir) { return dir / "checkpoint.json"; }

std::optional<Checkpoint> load_checkpoint(const fs::path& dir) {
    const auto path = checkpoint_path(dir);
    std::error_code ec;
    if (!fs::exists(path, ec)) return std::nullopt;
    const auto text = detail::read_file(path);
    try {
        auto j = json::parse(text);
        Checkpoint cp;
        cp.manifest_hash = j.at("manifest_hash").get<std::string>();
        cp.batch_size = j.at("batch_size").get<std::size_t>();
        cp.planned = j.at("planned").get<std::size_t>();
        for (const auto& i : j.at("completed")) cp.completed_indices.insert(i.get<std::uint32_t>());
        return cp;
    } catch (const json::exception& e) {
        throw FormatError(path, 1, std::string("bad checkpoint: ") + e.what());
    }
}

void save_checkpoint(const fs::path& dir, const Checkpoint& cp) {
    json j;
    j["manifest_hash"] = cp.manifest_hash;
    j["batch_size"] = cp.batch_size;
    j["planned"] = cp.planned;
    j["completed"] = json::array();
    for (auto i : cp.completed_indices) j["completed"].push_back(i);
    detail::write_file_atomic(checkpoint_path(dir), j.dump(2) + "\n");
}

}  // namespace explcorpus
