#include "roughdelay/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace roughdelay {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string path_to_csv(const GridPath& p) {
  std::string out = "t";
  for (std::size_t i = 1; i <= p.dim; ++i) out += ",v" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k <= p.grid.n; ++k) {
    out += format_double(p.grid.time(k));
    for (std::size_t i = 0; i < p.dim; ++i) out += "," + format_double(p.at(k)[i]);
    out += "\n";
  }
  return out;
}

std::string tensor_to_csv(const TwoParamTensor& t) {
  std::string out = "k";
  for (std::size_t i = 0; i < t.d(); ++i)
    for (std::size_t j = 0; j < t.m(); ++j)
      out += ",a_" + std::to_string(i) + "_" + std::to_string(j);
  out += "\n";
  for (std::size_t k = 0; k < t.grid().n; ++k) {
    out += std::to_string(k);
    const auto sk = t.step(k);
    for (double v : sk) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::string study_to_csv(const std::vector<StudyRow>& rows) {
  // runtime_ms is written as 0 so identical configs produce byte-identical
  // files; wall-clock timing goes to the run summary instead.
  std::string out =
      "seed,r,sup_err,tensor_sup_err,holder_err,yy_r_tensor_norm_1,"
      "yy_r_tensor_norm_2,runtime_ms\n";
  for (const auto& row : rows) {
    out += std::to_string(row.seed);
    out += "," + format_double(row.r);
    out += "," + format_double(row.sup_err);
    out += "," + format_double(row.tensor_sup_err);
    out += "," + format_double(row.holder_err);
    out += "," + format_double(row.yy_r_norm_1);
    out += "," + format_double(row.yy_r_norm_2);
    out += ",0\n";
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

GridPath path_from_csv(const std::string& content) {
  std::stringstream ss(content);
  std::string line;
  if (!std::getline(ss, line)) throw std::runtime_error("empty csv");
  std::size_t dim = 0;
  for (char c : line)
    if (c == ',') ++dim;
  if (dim == 0) throw std::runtime_error("path csv needs at least one value column");

  std::vector<double> times;
  std::vector<double> values;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(row, cell, ',')) {
      const double v = std::stod(cell);
      if (col == 0) times.push_back(v);
      else values.push_back(v);
      ++col;
    }
    if (col != dim + 1) throw std::runtime_error("ragged csv row");
  }
  if (times.size() < 2) throw std::runtime_error("path csv needs at least 2 rows");
  const double h = times[1] - times[0];
  Grid g(times[0], h, times.size() - 1);
  return GridPath(g, dim, std::move(values));
}

} // namespace roughdelay
