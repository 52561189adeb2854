#pragma once

#include "qbe/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qbe {

enum class Layout { CrossSection, TimeSeries };

/// Column-oriented numeric table. All columns share the same length;
/// time-series rows are in time order.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Layout layout) : layout_(layout) {}

  Layout layout() const { return layout_; }
  Index rows() const { return cols_.empty() ? 0 : cols_.front().second.size(); }
  Index n_columns() const { return static_cast<Index>(cols_.size()); }

  void add_column(const std::string& name, Vector values) {
    if (!cols_.empty() && values.size() != rows())
      throw SchemaError("column '" + name + "' has length " +
                        std::to_string(values.size()) + ", expected " +
                        std::to_string(rows()));
    if (has(name)) throw SchemaError("duplicate column '" + name + "'");
    cols_.emplace_back(name, std::move(values));
  }

  bool has(const std::string& name) const {
    for (const auto& [n, v] : cols_)
      if (n == name) return true;
    return false;
  }

  const Vector& col(const std::string& name) const {
    for (const auto& [n, v] : cols_)
      if (n == name) return v;
    throw SchemaError("missing column '" + name + "'");
  }

  /// Columns stacked side by side, in the order given. n x k.
  Matrix cols(const std::vector<std::string>& names) const {
    Matrix out(rows(), static_cast<Index>(names.size()));
    for (Index j = 0; j < out.cols(); ++j) out.col(j) = col(names[static_cast<size_t>(j)]);
    return out;
  }

  const std::vector<std::pair<std::string, Vector>>& columns() const { return cols_; }

 private:
  Layout layout_ = Layout::CrossSection;
  std::vector<std::pair<std::string, Vector>> cols_;
};

}  // namespace qbe
