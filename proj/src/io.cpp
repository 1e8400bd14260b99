#include "orbitcert/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace orbitcert {

ComplexMatrix read_cmat(std::istream& in) {
  in.imbue(std::locale::classic());
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0)
    throw UsageError("cmat: bad header, expected 'rows cols'");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double re = 0.0, im = 0.0;
      if (!(in >> re >> im))
        throw UsageError("cmat: truncated at entry (" + std::to_string(i) +
                         "," + std::to_string(j) + ")");
      m(i, j) = Complex(re, im);
    }
  return ComplexMatrix(std::move(m));
}

ComplexMatrix read_cmat_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cmat: cannot open " + path);
  return read_cmat(in);
}

void write_cmat(std::ostream& out, const Matrix& m) {
  out.imbue(std::locale::classic());
  out << m.rows() << ' ' << m.cols() << '\n'
      << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out << m(i, j).real() << ' ' << m(i, j).imag() << '\n';
}

void write_cmat_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw UsageError("cmat: cannot open " + path + " for writing");
  write_cmat(out, m);
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      entries.push_back({m(i, j).real(), m(i, j).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& entries = j.at("entries");
  if (rows <= 0 || cols <= 0 ||
      entries.size() != static_cast<size_t>(rows * cols))
    throw UsageError("matrix json: inconsistent dimensions");
  Matrix m(rows, cols);
  size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j2 = 0; j2 < cols; ++j2, ++k)
      m(i, j2) = Complex(entries[k].at(0).get<double>(),
                         entries[k].at(1).get<double>());
  return m;
}

}  // namespace orbitcert
