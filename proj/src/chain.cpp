#include "qbe/chain.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace qbe {

namespace {

using nlohmann::json;

void write_meta(const Chain& chain, const std::string& path, const char* format) {
  json meta;
  meta["format"] = format;
  meta["version"] = 1;
  meta["rows"] = chain.size();
  meta["cols"] = chain.dim();
  meta["seed"] = chain.seed;
  meta["sweeps_counted"] = chain.sweeps_counted;
  meta["accepts"] = std::vector<int>(chain.accepts.data(),
                                     chain.accepts.data() + chain.accepts.size());
  meta["final_scales"] = std::vector<double>(
      chain.final_scales.data(), chain.final_scales.data() + chain.final_scales.size());
  std::ofstream os(path + ".meta.json");
  if (!os) throw Error("cannot write " + path + ".meta.json");
  os << meta.dump(2) << "\n";
}

void read_meta(Chain& chain, const std::string& path) {
  std::ifstream is(path + ".meta.json");
  if (!is) throw Error("cannot read " + path + ".meta.json");
  json meta = json::parse(is);
  chain.seed = meta.at("seed").get<std::uint64_t>();
  chain.sweeps_counted = meta.at("sweeps_counted").get<Index>();
  const auto acc = meta.at("accepts").get<std::vector<int>>();
  chain.accepts = Eigen::Map<const Eigen::VectorXi>(acc.data(),
                                                    static_cast<Index>(acc.size()));
  const auto sc = meta.at("final_scales").get<std::vector<double>>();
  chain.final_scales =
      Eigen::Map<const Vector>(sc.data(), static_cast<Index>(sc.size()));
}

}  // namespace

void save_chain_csv(const Chain& chain, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path);
  os << std::setprecision(17);
  for (Index j = 0; j < chain.dim(); ++j) os << "theta_" << j << ",";
  os << "logpost\n";
  for (Index i = 0; i < chain.size(); ++i) {
    for (Index j = 0; j < chain.dim(); ++j) os << chain.draws(i, j) << ",";
    os << chain.logpost[i] << "\n";
  }
  write_meta(chain, path, "csv");
}

Chain load_chain_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot read " + path);
  std::string line;
  if (!std::getline(is, line)) throw Error(path + ": empty chain file");
  const auto cols = static_cast<Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<double> values;
  while (std::getline(is, line)) {
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
  }
  const Index rows = static_cast<Index>(values.size()) / cols;
  Chain chain;
  chain.draws.resize(rows, cols - 1);
  chain.logpost.resize(rows);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols - 1; ++j) chain.draws(i, j) = values[i * cols + j];
    chain.logpost[i] = values[i * cols + cols - 1];
  }
  read_meta(chain, path);
  return chain;
}

// Binary layout (little-endian): magic "QBECHN01", then u64 rows, u64 cols,
// then rows*cols float64 draws row-major, then rows float64 logpost.
void save_chain_binary(const Chain& chain, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os.write("QBECHN01", 8);
  const std::uint64_t rows = static_cast<std::uint64_t>(chain.size());
  const std::uint64_t cols = static_cast<std::uint64_t>(chain.dim());
  os.write(reinterpret_cast<const char*>(&rows), 8);
  os.write(reinterpret_cast<const char*>(&cols), 8);
  for (Index i = 0; i < chain.size(); ++i)
    for (Index j = 0; j < chain.dim(); ++j) {
      const double v = chain.draws(i, j);
      os.write(reinterpret_cast<const char*>(&v), 8);
    }
  os.write(reinterpret_cast<const char*>(chain.logpost.data()),
           static_cast<std::streamsize>(8 * chain.size()));
  write_meta(chain, path, "binary");
}

Chain load_chain_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path);
  char magic[8];
  is.read(magic, 8);
  if (std::memcmp(magic, "QBECHN01", 8) != 0) throw Error(path + ": bad chain magic");
  std::uint64_t rows = 0, cols = 0;
  is.read(reinterpret_cast<char*>(&rows), 8);
  is.read(reinterpret_cast<char*>(&cols), 8);
  Chain chain;
  chain.draws.resize(static_cast<Index>(rows), static_cast<Index>(cols));
  chain.logpost.resize(static_cast<Index>(rows));
  for (Index i = 0; i < chain.size(); ++i)
    for (Index j = 0; j < chain.dim(); ++j)
      is.read(reinterpret_cast<char*>(&chain.draws(i, j)), 8);
  is.read(reinterpret_cast<char*>(chain.logpost.data()),
          static_cast<std::streamsize>(8 * chain.size()));
  if (!is) throw Error(path + ": truncated chain file");
  read_meta(chain, path);
  return chain;
}

}  // namespace qbe
