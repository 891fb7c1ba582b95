#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "msq/error.hpp"

namespace msq {

// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  // Max absolute row sum.
  double norm_inf() const {
    double best = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (double x : row(r)) s += std::abs(x);
      best = std::max(best, s);
    }
    return best;
  }

  double norm_frobenius() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenDecomposition {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
  int sweeps = 0;
};

namespace detail {

// Flips v so its largest-magnitude entry (first one on ties) is positive.
inline void fix_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best]) + 1e-12) best = i;
  if (!v.empty() && v[best] < 0)
    for (double& x : v) x = -x;
}

inline void fix_column_signs(Matrix& vectors) {
  std::vector<double> col(vectors.rows());
  for (std::size_t c = 0; c < vectors.cols(); ++c) {
    for (std::size_t r = 0; r < vectors.rows(); ++r) col[r] = vectors(r, c);
    fix_sign(col);
    for (std::size_t r = 0; r < vectors.rows(); ++r) vectors(r, c) = col[r];
  }
}

}  // namespace detail

// Cyclic Jacobi rotations.
inline EigenDecomposition symmetric_eigen(const Matrix& input, int max_sweeps = 100) {
  if (input.rows() != input.cols())
    throw Error(ErrorKind::invalid_matrix, "matrix is " + std::to_string(input.rows()) + "x" +
                                               std::to_string(input.cols()) + ", not square");
  const std::size_t n = input.rows();
  const double scale = std::max(1.0, input.norm_inf());
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(input(i, j) - input(j, i)) > 1e-9 * scale)
        throw Error(ErrorKind::invalid_matrix, "matrix is not symmetric at (" + std::to_string(i) + ", " +
                                                   std::to_string(j) + ")");
      a(i, j) = 0.5 * (input(i, j) + input(j, i));
    }
  Matrix v = Matrix::identity(n);
  const double tol = 1e-12 * a.norm_frobenius();

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (;; ++sweep) {
    const double off = off_norm();
    if (off <= tol) break;
    if (sweep == max_sweeps)
      throw Error(ErrorKind::no_convergence, "Jacobi did not converge in " + std::to_string(max_sweeps) +
                                                 " sweeps; off-diagonal norm " + std::to_string(off));
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  EigenDecomposition out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(idx[c], idx[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, idx[c]);
  }
  detail::fix_column_signs(out.vectors);
  return out;
}

// ---------------------------------------------------------------------------

// One row per observation; binary features stored as reals.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> patterns;  // source pattern per row
};

struct ProjectionSet {
  std::vector<std::array<double, 2>> points;
  std::vector<std::string> labels;
  std::vector<std::string> patterns;

  std::size_t size() const noexcept { return points.size(); }
};

struct PcaModel {
  std::vector<double> mean;
  Matrix components;  // k x d, orthonormal rows
  std::vector<double> eigenvalues;  // all d, descending
  double total_variance = 0.0;      // trace of the covariance
};

struct PcaResult {
  PcaModel model;
  ProjectionSet projection;
};

inline std::vector<double> column_mean(const Matrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += x(r, c);
  for (double& m : mean) m /= static_cast<double>(x.rows());
  return mean;
}

// Sum over rows of (x - center)(x - center)^T.
inline Matrix scatter(const Matrix& x, std::span<const double> center) {
  const std::size_t d = x.cols();
  Matrix s(d, d);
  std::vector<double> dev(d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) dev[c] = x(r, c) - center[c];
    for (std::size_t i = 0; i < d; ++i) {
      if (dev[i] == 0.0) continue;
      for (std::size_t j = i; j < d; ++j) s(i, j) += dev[i] * dev[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) s(i, j) = s(j, i);
  return s;
}

inline std::array<double, 2> project_row(std::span<const double> row, std::span<const double> center,
                                         const Matrix& directions) {
  std::array<double, 2> p{0.0, 0.0};
  for (std::size_t k = 0; k < std::min<std::size_t>(2, directions.rows()); ++k)
    for (std::size_t c = 0; c < row.size(); ++c) p[k] += (row[c] - center[c]) * directions(k, c);
  return p;
}

inline PcaResult pca_fit(const DataMatrix& data, std::size_t k = 2) {
  const Matrix& x = data.values;
  if (x.rows() < 2) throw Error(ErrorKind::insufficient_data, "PCA needs at least 2 rows");
  if (k > x.cols()) throw Error(ErrorKind::usage, "k exceeds the feature count");
  PcaResult out;
  out.model.mean = column_mean(x);
  Matrix cov = scatter(x, out.model.mean);
  const double divisor = static_cast<double>(x.rows() - 1);
  for (std::size_t i = 0; i < cov.rows(); ++i)
    for (std::size_t j = 0; j < cov.cols(); ++j) cov(i, j) /= divisor;
  out.model.total_variance = cov.trace();

  auto eig = symmetric_eigen(cov);
  for (double& v : eig.values)
    if (v < 0.0 && v >= -1e-10) v = 0.0;
  out.model.eigenvalues = eig.values;
  out.model.components = Matrix(k, x.cols());
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = 0; r < x.cols(); ++r) out.model.components(c, r) = eig.vectors(r, c);

  for (std::size_t r = 0; r < x.rows(); ++r)
    out.projection.points.push_back(project_row(x.row(r), out.model.mean, out.model.components));
  out.projection.patterns = data.patterns;
  return out;
}

// ---------------------------------------------------------------------------

struct LdaModel {
  std::vector<std::string> classes;  // sorted class labels
  Matrix class_means;                // one row per class
  std::vector<double> mean;
  Matrix within;   // S_w
  Matrix between;  // S_b
  Matrix directions;                // k x d
  std::vector<double> eigenvalues;  // discriminant eigenvalues, descending, all retained
  std::vector<bool> null_direction;  // per direction in `directions`
  std::size_t retained_rank = 0;     // S_w eigenvalues kept by the pseudo-inverse
  bool within_regularized = false;   // S_w vanished; identity used instead
};

struct LdaResult {
  LdaModel model;
  ProjectionSet projection;
};

// Discriminant eigenvalues above this fraction of the largest count as positive.
inline constexpr double lda_positive_tolerance = 1e-9;

inline std::size_t positive_eigenvalue_count(const std::vector<double>& values) {
  const double top = values.empty() ? 0.0 : std::max(0.0, values.front());
  return static_cast<std::size_t>(std::count_if(
      values.begin(), values.end(), [&](double v) { return v > lda_positive_tolerance * top && v > 0.0; }));
}

inline LdaResult lda_fit(const DataMatrix& data, std::span<const std::string> labels, std::size_t k = 2) {
  const Matrix& x = data.values;
  const std::size_t d = x.cols();
  if (labels.size() != x.rows()) throw Error(ErrorKind::usage, "one label per row required");
  if (x.rows() == 0) throw Error(ErrorKind::insufficient_data, "LDA needs data");

  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < x.rows(); ++r) members[labels[r]].push_back(r);
  if (members.size() < 2) throw Error(ErrorKind::degenerate_labels, "LDA needs at least 2 classes");

  LdaResult out;
  LdaModel& model = out.model;
  model.mean = column_mean(x);
  model.class_means = Matrix(members.size(), d);
  model.within = Matrix(d, d);
  model.between = Matrix(d, d);
  std::size_t ci = 0;
  for (const auto& [label, rows] : members) {
    model.classes.push_back(label);
    Matrix sub(rows.size(), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < d; ++c) sub(i, c) = x(rows[i], c);
    const auto mu = column_mean(sub);
    for (std::size_t c = 0; c < d; ++c) model.class_means(ci, c) = mu[c];
    const Matrix sw = scatter(sub, mu);
    const double weight = static_cast<double>(rows.size());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        model.within(i, j) += sw(i, j);
        model.between(i, j) += weight * (mu[i] - model.mean[i]) * (mu[j] - model.mean[j]);
      }
    ++ci;
  }

  // Whitening W with W^T S_w W = I on the retained subspace of S_w.
  const auto sw_eig = symmetric_eigen(model.within);
  const double top = sw_eig.values.empty() ? 0.0 : sw_eig.values.front();
  Matrix whiten;
  if (top <= 1e-12) {
    whiten = Matrix::identity(d);
    model.within_regularized = true;
    model.retained_rank = 0;
  } else {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d; ++i)
      if (sw_eig.values[i] > 1e-10 * top) keep.push_back(i);
    whiten = Matrix(d, keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c) {
      const double s = 1.0 / std::sqrt(sw_eig.values[keep[c]]);
      for (std::size_t r = 0; r < d; ++r) whiten(r, c) = sw_eig.vectors(r, keep[c]) * s;
    }
    model.retained_rank = keep.size();
  }

  const Matrix reduced = whiten.transpose() * model.between * whiten;
  const auto eig = symmetric_eigen(reduced);
  model.eigenvalues = eig.values;
  for (double& v : model.eigenvalues)
    if (v < 0.0 && v >= -1e-10) v = 0.0;
  const Matrix full = whiten * eig.vectors;  // d x r, columns are directions

  const std::size_t available = full.cols();
  const std::size_t positive = positive_eigenvalue_count(model.eigenvalues);
  model.directions = Matrix(k, d);
  for (std::size_t c = 0; c < k; ++c) {
    const bool usable = c < available && c < positive && c + 1 < members.size();
    model.null_direction.push_back(!usable);
    if (!usable) continue;
    for (std::size_t r = 0; r < d; ++r) model.directions(c, r) = full(r, c);
    detail::fix_sign(model.directions.row(c));
  }

  for (std::size_t r = 0; r < x.rows(); ++r)
    out.projection.points.push_back(project_row(x.row(r), model.mean, model.directions));
  out.projection.labels.assign(labels.begin(), labels.end());
  out.projection.patterns = data.patterns;
  return out;
}

// ---------------------------------------------------------------------------

struct Histogram {
  std::vector<double> edges;  // counts.size() + 1 entries
  std::vector<std::uint64_t> counts;
};

// Equal-width bins over [min, max], last bin closed. A zero-width range
// collapses to one bin holding every value.
inline Histogram histogram(std::span<const double> values, int bins) {
  if (values.empty()) throw Error(ErrorKind::insufficient_data, "histogram of no values");
  if (bins < 1) throw Error(ErrorKind::usage, "histogram needs at least one bin");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, hi = *hi_it;
  Histogram h;
  if (hi == lo) {
    h.edges = {lo, hi};
    h.counts = {values.size()};
    return h;
  }
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(b == bins ? hi : lo + b * width);
  h.counts.assign(bins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    ++h.counts[b];
  }
  return h;
}

struct NormalOverlay {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

inline constexpr int normal_overlay_samples = 256;

inline NormalOverlay normal_overlay(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::insufficient_data, "normal overlay needs 2 values");
  NormalOverlay o;
  const double n = static_cast<double>(values.size());
  o.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - o.mean) * (v - o.mean);
  const double var = ss / (n - 1.0);
  if (!(var > 0.0)) throw Error(ErrorKind::degenerate_distribution, "values have zero variance");
  o.stddev = std::sqrt(var);
  const double lo = o.mean - 4.0 * o.stddev, hi = o.mean + 4.0 * o.stddev;
  const double norm = 1.0 / (o.stddev * std::sqrt(2.0 * std::numbers::pi));
  for (int i = 0; i < normal_overlay_samples; ++i) {
    const double xi = lo + (hi - lo) * i / (normal_overlay_samples - 1);
    const double z = (xi - o.mean) / o.stddev;
    o.x.push_back(xi);
    o.density.push_back(norm * std::exp(-0.5 * z * z));
  }
  return o;
}

// ---------------------------------------------------------------------------

struct BoundingBox {
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  double diagonal() const { return std::hypot(max_x - min_x, max_y - min_y); }
};

inline BoundingBox bounding_box(const std::vector<std::array<double, 2>>& points) {
  BoundingBox b;
  if (points.empty()) return b;
  b.min_x = b.max_x = points[0][0];
  b.min_y = b.max_y = points[0][1];
  for (const auto& p : points) {
    b.min_x = std::min(b.min_x, p[0]);
    b.max_x = std::max(b.max_x, p[0]);
    b.min_y = std::min(b.min_y, p[1]);
    b.max_y = std::max(b.max_y, p[1]);
  }
  return b;
}

// Point positions with coincident points (within tol) merged, in first-seen order.
inline std::vector<std::array<double, 2>> distinct_points(const std::vector<std::array<double, 2>>& points,
                                                          double tol = 1e-9) {
  std::vector<std::array<double, 2>> out;
  std::vector<std::array<double, 2>> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& p : sorted) {
    bool seen = false;
    for (auto it = out.rbegin(); it != out.rend() && p[0] - (*it)[0] <= tol; ++it)
      if (std::abs(p[1] - (*it)[1]) <= tol) {
        seen = true;
        break;
      }
    if (!seen) out.push_back(p);
  }
  return out;
}

// Counts on a grid x grid lattice over the bounding box; row 0 is the lowest y.
inline std::vector<std::vector<std::uint64_t>> density_grid(const std::vector<std::array<double, 2>>& points,
                                                            int grid = 64) {
  std::vector<std::vector<std::uint64_t>> cells(grid, std::vector<std::uint64_t>(grid, 0));
  const auto box = bounding_box(points);
  auto bin = [grid](double v, double lo, double hi) {
    if (hi <= lo) return 0;
    return std::clamp(static_cast<int>((v - lo) / (hi - lo) * grid), 0, grid - 1);
  };
  for (const auto& p : points) ++cells[bin(p[1], box.min_y, box.max_y)][bin(p[0], box.min_x, box.max_x)];
  return cells;
}

// Number of connected components when distinct points closer than `link` are joined.
inline std::size_t link_clusters(const std::vector<std::array<double, 2>>& points, double link) {
  const auto pts = distinct_points(points);
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]) <= link) parent[find(i)] = find(j);
  std::size_t groups = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (find(i) == i) ++groups;
  return groups;
}

}  // namespace msq
