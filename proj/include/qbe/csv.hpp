#pragma once

#include "qbe/dataset.hpp"

#include <string>
#include <vector>

namespace qbe {

/// Reads a comma-separated file with a header row into a Dataset. Every
/// cell must parse as a number; failures raise SchemaError naming the row
/// and column. `required` columns are checked for presence after the load.
Dataset load_csv(const std::string& path,
                 const std::vector<std::string>& required = {},
                 Layout layout = Layout::CrossSection);

void save_csv(const Dataset& data, const std::string& path);

}  // namespace qbe
