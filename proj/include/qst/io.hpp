#ifndef QST_IO_HPP
#define QST_IO_HPP

// CSV grids (header l,t,value; t outer, l inner; 12 significant digits) and
// their JSON sidecar.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qst/chain.hpp"
#include "qst/convention.hpp"

namespace qst {

/// Failure to read or write a file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

/// Row-major samples: values[ti][li] for sites[li] at times[ti].
struct CsvTable {
  std::string time_label = "t";
  std::vector<int> sites;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
};

inline void write_csv(std::ostream& out, const CsvTable& tab) {
  out << "l," << tab.time_label << ",value\n";
  for (std::size_t ti = 0; ti < tab.times.size(); ++ti)
    for (std::size_t li = 0; li < tab.sites.size(); ++li)
      out << tab.sites[li] << ',' << format_number(tab.times[ti]) << ',' << format_number(tab.values[ti][li]) << '\n';
}

inline nlohmann::json chain_json(const ChainSpec& s) {
  return {{"n", s.n}, {"boundary", to_string(s.boundary)}, {"j", s.j}, {"delta", s.delta}, {"model", to_string(s.model)}};
}

inline nlohmann::json meta_json(const std::string& command, const nlohmann::json& parameters) {
  return {{"command", command},
          {"version", std::string(kVersion)},
          {"convention_hash", convention_hash()},
          {"csv", {{"columns", {"l", "t", "value"}}, {"order", "t outer, l inner"}, {"digits", 12}}},
          {"parameters", parameters}};
}

/// Writes <path> and <path>.meta.json.
inline void write_outputs(const std::string& path, const CsvTable& tab, const nlohmann::json& meta) {
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw IoError("cannot open " + path + " for writing");
  write_csv(csv, tab);
  if (!csv) throw IoError("write failed: " + path);
  std::ofstream side(path + ".meta.json", std::ios::binary);
  if (!side) throw IoError("cannot open " + path + ".meta.json for writing");
  side << meta.dump(2) << '\n';
  if (!side) throw IoError("write failed: " + path + ".meta.json");
}

}  // namespace qst

#endif  // QST_IO_HPP
