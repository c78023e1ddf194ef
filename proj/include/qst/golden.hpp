#ifndef QST_GOLDEN_HPP
#define QST_GOLDEN_HPP

// Frozen reference values: one JSON record per case.
//
//   { "name": ..., "inputs": {...}, "convention_hash": ...,
//     "tolerance": ..., "values": [[re, im], ...] }

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qst/chain.hpp"
#include "qst/convention.hpp"

namespace qst {

struct GoldenRecord {
  std::string name;
  nlohmann::json inputs = nlohmann::json::object();
  std::string convention_hash = qst::convention_hash();
  double tolerance = 1e-10;
  std::vector<cplx> values;

  nlohmann::json to_json() const {
    nlohmann::json v = nlohmann::json::array();
    for (const cplx& z : values) v.push_back({z.real(), z.imag()});
    return {{"name", name}, {"inputs", inputs}, {"convention_hash", convention_hash}, {"tolerance", tolerance}, {"values", v}};
  }

  static GoldenRecord from_json(const nlohmann::json& j) {
    GoldenRecord r;
    r.name = j.at("name").get<std::string>();
    r.inputs = j.at("inputs");
    r.convention_hash = j.at("convention_hash").get<std::string>();
    r.tolerance = j.at("tolerance").get<double>();
    for (const auto& z : j.at("values")) r.values.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    return r;
  }
};

inline void write_golden(const std::string& path, const GoldenRecord& r) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << r.to_json().dump(1) << '\n';
}

inline GoldenRecord read_golden(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return GoldenRecord::from_json(nlohmann::json::parse(in));
}

/// Largest |a - b| over paired entries; sizes must agree.
inline double max_deviation(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("golden: value count mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace qst

#endif  // QST_GOLDEN_HPP
