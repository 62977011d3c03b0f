#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Core>

namespace osgnn {

using index_t = std::int64_t;

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Row-major dense matrix of doubles.
struct DenseMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<double> data;  // rows*cols, row-major

  DenseMatrix() = default;
  DenseMatrix(index_t r, index_t c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), fill) {}

  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rs) {
    DenseMatrix m;
    m.rows = static_cast<index_t>(rs.size());
    m.cols = rs.size() ? static_cast<index_t>(rs.begin()->size()) : 0;
    m.data.reserve(static_cast<std::size_t>(m.rows * m.cols));
    for (const auto& r : rs) {
      if (static_cast<index_t>(r.size()) != m.cols)
        throw DimensionError("from_rows: ragged row");
      m.data.insert(m.data.end(), r.begin(), r.end());
    }
    return m;
  }

  double& operator()(index_t i, index_t j) { return data[static_cast<std::size_t>(i * cols + j)]; }
  double operator()(index_t i, index_t j) const { return data[static_cast<std::size_t>(i * cols + j)]; }

  double* row(index_t i) { return data.data() + i * cols; }
  const double* row(index_t i) const { return data.data() + i * cols; }

  bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

using EigenRowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<EigenRowMajor> as_eigen(DenseMatrix& m) {
  return {m.data.data(), m.rows, m.cols};
}
inline Eigen::Map<const EigenRowMajor> as_eigen(const DenseMatrix& m) {
  return {m.data.data(), m.rows, m.cols};
}

inline std::string shape_str(index_t r, index_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

inline bool all_finite(const DenseMatrix& m) {
  for (double v : m.data)
    if (!std::isfinite(v)) return false;
  return true;
}

// c = a * b
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows)
    throw DimensionError("matmul: " + shape_str(a.rows, a.cols) + " * " + shape_str(b.rows, b.cols));
  DenseMatrix c(a.rows, b.cols);
  as_eigen(c).noalias() = as_eigen(a) * as_eigen(b);
  return c;
}

// c = a^T * b  (a and b share the row dimension)
inline DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows != b.rows)
    throw DimensionError("matmul_tn: " + shape_str(a.rows, a.cols) + "^T * " + shape_str(b.rows, b.cols));
  DenseMatrix c(a.cols, b.cols);
  as_eigen(c).noalias() = as_eigen(a).transpose() * as_eigen(b);
  return c;
}

// c = a * b^T
inline DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.cols)
    throw DimensionError("matmul_nt: " + shape_str(a.rows, a.cols) + " * " + shape_str(b.rows, b.cols) + "^T");
  DenseMatrix c(a.rows, b.rows);
  as_eigen(c).noalias() = as_eigen(a) * as_eigen(b).transpose();
  return c;
}

// CSR sparse matrix. col_idx strictly increasing within each row.
struct SparseMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<index_t> row_ptr{0};
  std::vector<index_t> col_idx;
  std::vector<double> values;

  index_t nnz() const { return static_cast<index_t>(values.size()); }

  // Duplicate entries are summed.
  static SparseMatrix from_triplets(index_t r, index_t c,
                                    std::vector<std::tuple<index_t, index_t, double>> trip) {
    std::sort(trip.begin(), trip.end(), [](const auto& x, const auto& y) {
      return std::tie(std::get<0>(x), std::get<1>(x)) < std::tie(std::get<0>(y), std::get<1>(y));
    });
    SparseMatrix s;
    s.rows = r;
    s.cols = c;
    s.row_ptr.assign(static_cast<std::size_t>(r) + 1, 0);
    for (std::size_t i = 0; i < trip.size(); ++i) {
      auto [ti, tj, tv] = trip[i];
      if (ti < 0 || ti >= r || tj < 0 || tj >= c)
        throw DimensionError("from_triplets: index out of range");
      if (!s.col_idx.empty() && !trip.empty() && i > 0 && std::get<0>(trip[i - 1]) == ti &&
          std::get<1>(trip[i - 1]) == tj) {
        s.values.back() += tv;
        continue;
      }
      s.col_idx.push_back(tj);
      s.values.push_back(tv);
      s.row_ptr[static_cast<std::size_t>(ti) + 1]++;
    }
    for (index_t i = 0; i < r; ++i) s.row_ptr[i + 1] += s.row_ptr[i];
    return s;
  }
};

inline DenseMatrix densify(const SparseMatrix& s) {
  DenseMatrix d(s.rows, s.cols);
  for (index_t i = 0; i < s.rows; ++i)
    for (index_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k)
      d(i, s.col_idx[k]) = s.values[k];
  return d;
}

// c = s * d, sequential accumulation in CSR order.
inline DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d) {
  if (s.cols != d.rows)
    throw DimensionError("spmm: " + shape_str(s.rows, s.cols) + " * " + shape_str(d.rows, d.cols));
  DenseMatrix c(s.rows, d.cols);
  for (index_t i = 0; i < s.rows; ++i) {
    double* out = c.row(i);
    for (index_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
      const double v = s.values[k];
      const double* in = d.row(s.col_idx[k]);
      for (index_t j = 0; j < d.cols; ++j) out[j] += v * in[j];
    }
  }
  return c;
}

// c = s^T * d without materializing the transpose.
inline DenseMatrix spmm_tn(const SparseMatrix& s, const DenseMatrix& d) {
  if (s.rows != d.rows)
    throw DimensionError("spmm_tn: " + shape_str(s.rows, s.cols) + "^T * " + shape_str(d.rows, d.cols));
  DenseMatrix c(s.cols, d.cols);
  for (index_t i = 0; i < s.rows; ++i) {
    const double* in = d.row(i);
    for (index_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
      const double v = s.values[k];
      double* out = c.row(s.col_idx[k]);
      for (index_t j = 0; j < d.cols; ++j) out[j] += v * in[j];
    }
  }
  return c;
}

// Drops exact zeros. Used to route sparse feature matrices through spmm.
inline SparseMatrix csr_from_dense(const DenseMatrix& d) {
  SparseMatrix s;
  s.rows = d.rows;
  s.cols = d.cols;
  s.row_ptr.assign(static_cast<std::size_t>(d.rows) + 1, 0);
  for (index_t i = 0; i < d.rows; ++i) {
    for (index_t j = 0; j < d.cols; ++j) {
      const double v = d(i, j);
      if (v != 0.0) {
        s.col_idx.push_back(j);
        s.values.push_back(v);
      }
    }
    s.row_ptr[i + 1] = static_cast<index_t>(s.col_idx.size());
  }
  return s;
}

inline double density(const DenseMatrix& d) {
  if (d.rows == 0 || d.cols == 0) return 0.0;
  std::size_t nz = 0;
  for (double v : d.data) nz += (v != 0.0);
  return static_cast<double>(nz) / static_cast<double>(d.data.size());
}

// Max-shifted row softmax; rows sum to 1 even for large magnitudes.
inline DenseMatrix softmax_rows(const DenseMatrix& m) {
  DenseMatrix out(m.rows, m.cols);
  for (index_t i = 0; i < m.rows; ++i) {
    const double* in = m.row(i);
    double* o = out.row(i);
    double mx = -std::numeric_limits<double>::infinity();
    for (index_t j = 0; j < m.cols; ++j) mx = std::max(mx, in[j]);
    double sum = 0.0;
    for (index_t j = 0; j < m.cols; ++j) {
      o[j] = std::exp(in[j] - mx);
      sum += o[j];
    }
    for (index_t j = 0; j < m.cols; ++j) o[j] /= sum;
  }
  return out;
}

inline DenseMatrix relu(const DenseMatrix& m) {
  DenseMatrix out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.data.size(); ++i) out.data[i] = m.data[i] > 0.0 ? m.data[i] : 0.0;
  return out;
}

// Masks upstream where the pre-activation input was <= 0.
inline DenseMatrix relu_backward(const DenseMatrix& pre, const DenseMatrix& upstream) {
  if (!pre.same_shape(upstream))
    throw DimensionError("relu_backward: shape mismatch");
  DenseMatrix out(pre.rows, pre.cols);
  for (std::size_t i = 0; i < pre.data.size(); ++i)
    out.data[i] = pre.data[i] > 0.0 ? upstream.data[i] : 0.0;
  return out;
}

inline DenseMatrix colsum(const DenseMatrix& m) {
  DenseMatrix out(1, m.cols);
  for (index_t i = 0; i < m.rows; ++i)
    for (index_t j = 0; j < m.cols; ++j) out.data[static_cast<std::size_t>(j)] += m(i, j);
  return out;
}

inline DenseMatrix vstack(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.cols) throw DimensionError("vstack: column mismatch");
  DenseMatrix out(a.rows + b.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
  return out;
}

// Trainable value with a gradient buffer of identical shape.
struct ParamTensor {
  DenseMatrix value;
  DenseMatrix grad;

  ParamTensor() = default;
  ParamTensor(index_t r, index_t c) : value(r, c), grad(r, c) {}

  index_t size() const { return value.rows * value.cols; }
  void zero_grad() { grad.fill(0.0); }
};

// value <- value - lr * grad; grad is zeroed afterwards.
inline void sgd_step(ParamTensor& p, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("sgd_step: lr must be > 0");
  for (std::size_t i = 0; i < p.grad.data.size(); ++i) {
    if (!std::isfinite(p.grad.data[i]))
      throw NumericError("sgd_step: non-finite gradient entry");
    p.value.data[i] -= lr * p.grad.data[i];
  }
  p.zero_grad();
}

}  // namespace osgnn
