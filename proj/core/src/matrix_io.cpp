#include "lfgs/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace lfgs {

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  os << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m(i, j);
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 1 || cols < 1)
    throw std::runtime_error("read_matrix: bad header");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (!(is >> m(i, j)))
        throw std::runtime_error("read_matrix: truncated data");
  if (!m.allFinite()) throw std::runtime_error("read_matrix: non-finite entry");
  return m;
}

void save_matrix(const std::string& filename, const Matrix& m) {
  std::ofstream f(filename);
  if (!f) throw std::runtime_error("save_matrix: cannot open " + filename);
  write_matrix(f, m);
}

Matrix load_matrix(const std::string& filename) {
  std::ifstream f(filename);
  if (!f) throw std::runtime_error("load_matrix: cannot open " + filename);
  return read_matrix(f);
}

StiefelPoint load_point(const std::string& filename) {
  return make_point(load_matrix(filename));
}

void save_point(const std::string& filename, const StiefelPoint& x) {
  save_matrix(filename, x.mat);
}

void write_path(std::ostream& os, const PiecewisePath& path) {
  os << path.m() << ' ' << path.n() << ' ' << path.p() << '\n';
  for (const auto& pt : path.points) write_matrix(os, pt.mat);
}

PiecewisePath read_path(std::istream& is) {
  int m = 0;
  Index n = 0, p = 0;
  if (!(is >> m >> n >> p) || m < 3)
    throw std::runtime_error("read_path: bad header");
  PiecewisePath path;
  path.points.reserve(m);
  for (int i = 0; i < m; ++i) {
    Matrix mat = read_matrix(is);
    if (mat.rows() != n || mat.cols() != p)
      throw std::runtime_error("read_path: dimension mismatch at point " +
                               std::to_string(i));
    path.points.push_back(make_point(mat));
  }
  return path;
}

void save_path(const std::string& filename, const PiecewisePath& path) {
  std::ofstream f(filename);
  if (!f) throw std::runtime_error("save_path: cannot open " + filename);
  write_path(f, path);
}

PiecewisePath load_path(const std::string& filename) {
  std::ifstream f(filename);
  if (!f) throw std::runtime_error("load_path: cannot open " + filename);
  return read_path(f);
}

}  // namespace lfgs
