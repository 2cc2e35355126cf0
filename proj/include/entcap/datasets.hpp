#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "entcap/model.hpp"

namespace entcap {

namespace detail {
struct EmbeddedFile {
  std::string_view name;
  std::string_view content;
};
const std::vector<EmbeddedFile>& embedded_files();
}  // namespace detail

struct DatasetInfo {
  std::string name;
  std::string description;
};

// The five bundled study networks, in listing order.
std::vector<DatasetInfo> list_datasets();
bool is_dataset(std::string_view name);

/// Raw document of a bundled topology or fixture ("fig6", "table1", ...).
/// Throws ValidationError for an unknown name.
std::string_view bundled_document(std::string_view name);

Topology load_dataset(std::string_view name);

/// A bundled dataset or fixture name, otherwise a path to a topology file.
Topology resolve_topology(const std::string& name_or_path);

/// Same lookup for assignment documents; returns the raw text.
std::string resolve_document(const std::string& name_or_path);

}  // namespace entcap
