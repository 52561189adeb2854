#include "qbe/csv.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qbe {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::vector<std::string>& required,
                 Layout layout) {
  std::ifstream is(path);
  if (!is) throw SchemaError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw SchemaError(path + ": missing header row");
  std::vector<std::string> names;
  for (auto& h : split_line(line)) names.push_back(strip(h));

  std::vector<std::vector<double>> cols(names.size());
  long row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (strip(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != names.size())
      throw SchemaError(path + ":" + std::to_string(row) + ": expected " +
                        std::to_string(names.size()) + " cells, got " +
                        std::to_string(cells.size()));
    for (size_t j = 0; j < cells.size(); ++j) {
      const std::string cell = strip(cells[j]);
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || errno == ERANGE)
        throw SchemaError(path + ":" + std::to_string(row) + ": column '" + names[j] +
                          "': cannot parse '" + cell + "' as a number");
      cols[j].push_back(v);
    }
  }

  Dataset data(layout);
  for (size_t j = 0; j < names.size(); ++j)
    data.add_column(names[j], Eigen::Map<const Vector>(
                                  cols[j].data(), static_cast<Index>(cols[j].size())));
  for (const auto& name : required)
    if (!data.has(name)) throw SchemaError(path + ": missing column '" + name + "'");
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw SchemaError("cannot write " + path);
  os << std::setprecision(17);
  const auto& cols = data.columns();
  for (size_t j = 0; j < cols.size(); ++j)
    os << cols[j].first << (j + 1 < cols.size() ? "," : "");
  os << "\n";
  for (Index i = 0; i < data.rows(); ++i) {
    for (size_t j = 0; j < cols.size(); ++j)
      os << cols[j].second[i] << (j + 1 < cols.size() ? "," : "");
    os << "\n";
  }
}

}  // namespace qbe
