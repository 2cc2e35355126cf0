#include "entcap/datasets.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "entcap/errors.hpp"

namespace entcap {

namespace {

constexpr std::string_view kStudyNetworks[] = {"five_node", "abilene", "abilene_mux2", "nsfnet",
                                               "surfnet"};

const detail::EmbeddedFile* find_file(std::string_view name) {
  for (const auto& f : detail::embedded_files()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

}  // namespace

std::vector<DatasetInfo> list_datasets() {
  std::vector<DatasetInfo> out;
  for (auto name : kStudyNetworks) {
    const auto doc = nlohmann::json::parse(bundled_document(name));
    out.push_back({std::string(name), doc.value("description", "")});
  }
  return out;
}

bool is_dataset(std::string_view name) { return find_file(name) != nullptr; }

std::string_view bundled_document(std::string_view name) {
  if (const auto* f = find_file(name)) return f->content;
  throw ValidationError("dataset", "unknown dataset '" + std::string(name) + "'");
}

Topology load_dataset(std::string_view name) { return load_topology(bundled_document(name)); }

std::string resolve_document(const std::string& name_or_path) {
  if (const auto* f = find_file(name_or_path)) return std::string(f->content);
  std::ifstream in(name_or_path);
  if (!in) {
    throw ValidationError("topology", "'" + name_or_path +
                                          "' is neither a bundled dataset nor a readable file");
  }
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

Topology resolve_topology(const std::string& name_or_path) {
  return load_topology(resolve_document(name_or_path));
}

}  // namespace entcap
