#pragma once

#include "oplab/errors.hpp"
#include "oplab/spectral.hpp"

#include <json.hpp>

#include <complex>
#include <fstream>
#include <string>

namespace oplab {

/// {"dim": d, "field": "real"|"complex", "entries": [...]} with entries
/// row-major; complex entries are [re, im] pairs.
template <class Scalar>
nlohmann::json to_json(const HermitianMatrix<Scalar>& h) {
  nlohmann::json j;
  j["dim"] = h.dim();
  j["field"] = is_complex_v<Scalar> ? "complex" : "real";
  auto entries = nlohmann::json::array();
  for (int r = 0; r < h.dim(); ++r)
    for (int c = 0; c < h.dim(); ++c) {
      if constexpr (is_complex_v<Scalar>) {
        entries.push_back({h(r, c).real(), h(r, c).imag()});
      } else {
        entries.push_back(h(r, c));
      }
    }
  j["entries"] = std::move(entries);
  return j;
}

template <class Scalar>
HermitianMatrix<Scalar> matrix_from_json(const nlohmann::json& j, double hermitian_rel = TolerancePolicy{}.hermitian_rel) {
  try {
    const int dim = j.at("dim").get<int>();
    if (dim < 1) throw RangeError("matrix JSON: dim must be >= 1");
    const std::string field = j.value("field", "real");
    if (field != "real" && field != "complex") throw RangeError("matrix JSON: unknown field '" + field + "'");
    if (field == "complex" && !is_complex_v<Scalar>) throw RangeError("matrix JSON: complex matrix in real mode");
    const auto& e = j.at("entries");
    if (!e.is_array() || e.size() != static_cast<std::size_t>(dim) * dim)
      throw RangeError("matrix JSON: expected dim*dim entries");
    Dense<Scalar> m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) {
        const auto& x = e[static_cast<std::size_t>(r) * dim + c];
        if constexpr (is_complex_v<Scalar>) {
          if (x.is_array()) {
            m(r, c) = Scalar(x.at(0).get<double>(), x.at(1).get<double>());
          } else {
            m(r, c) = Scalar(x.get<double>(), 0.0);
          }
        } else {
          m(r, c) = x.get<double>();
        }
      }
    return HermitianMatrix<Scalar>(m, hermitian_rel);
  } catch (const nlohmann::json::exception& ex) {
    throw RangeError(std::string("matrix JSON: ") + ex.what());
  }
}

template <class Scalar>
HermitianMatrix<Scalar> load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw RangeError(path + ": " + ex.what());
  }
  return matrix_from_json<Scalar>(j);
}

template <class Scalar>
void save_matrix(const HermitianMatrix<Scalar>& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << to_json(h).dump(2) << '\n';
}

}  // namespace oplab
