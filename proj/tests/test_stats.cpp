#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "msq/dataset.hpp"
#include "msq/enumerate.hpp"
#include "msq/stats.hpp"
#include "oracles.hpp"

using namespace msq;

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& a) {
  Matrix m(a.size(), a.empty() ? 0 : a[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m(i, j) = a[i][j];
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

Matrix reconstruct(const EigenDecomposition& e) {
  const std::size_t d = e.values.size();
  Matrix lambda(d, d);
  for (std::size_t i = 0; i < d; ++i) lambda(i, i) = e.values[i];
  return e.vectors * lambda * e.vectors.transpose();
}

const std::vector<Square>& general4() {
  static const auto squares = enumerate_family({Family::general, 4}).squares;
  return squares;
}

DataMatrix rows(std::initializer_list<std::vector<double>> values) {
  DataMatrix d;
  d.values = to_matrix(values);
  for (std::size_t i = 0; i < values.size(); ++i) d.patterns.push_back("r" + std::to_string(i));
  return d;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::usage;
}

}  // namespace

TEST(Eigen, HandExamples) {
  const auto id = symmetric_eigen(Matrix::identity(2));
  EXPECT_DOUBLE_EQ(id.values[0], 1.0);
  EXPECT_DOUBLE_EQ(id.values[1], 1.0);

  const auto e = symmetric_eigen(to_matrix({{2, 1}, {1, 2}}));
  EXPECT_NEAR(e.values[0], 3.0, 1e-12);
  EXPECT_NEAR(e.values[1], 1.0, 1e-12);
  const double h = std::sqrt(0.5);
  EXPECT_NEAR(e.vectors(0, 0), h, 1e-12);
  EXPECT_NEAR(e.vectors(1, 0), h, 1e-12);
  // largest-magnitude entry positive, first one on ties
  EXPECT_NEAR(e.vectors(0, 1), h, 1e-12);
  EXPECT_NEAR(e.vectors(1, 1), -h, 1e-12);
}

TEST(Eigen, Errors) {
  EXPECT_EQ(kind_of([] { symmetric_eigen(Matrix(2, 3)); }), ErrorKind::invalid_matrix);
  EXPECT_EQ(kind_of([] { symmetric_eigen(to_matrix({{1, 2}, {0, 1}})); }), ErrorKind::invalid_matrix);
  std::mt19937_64 rng(7);
  const auto a = to_matrix(oracle::random_symmetric(12, rng));
  EXPECT_EQ(kind_of([&] { symmetric_eigen(a, 0); }), ErrorKind::no_convergence);
}

TEST(Eigen, CharacteristicPolynomialOracle) {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 4;
    const auto a = oracle::random_symmetric(d, rng);
    const auto roots = oracle::real_roots(oracle::char_poly(a), static_cast<double>(d) + 1.0);
    ASSERT_EQ(static_cast<int>(roots.size()), d);
    const auto e = symmetric_eigen(to_matrix(a));
    for (int i = 0; i < d; ++i) EXPECT_NEAR(e.values[i], roots[d - 1 - i], 1e-6);
  }
}

TEST(Eigen, ReconstructionAndOrthonormality) {
  std::mt19937_64 rng(99);
  for (int d : {2, 5, 16, 33, 64}) {
    const Matrix a = to_matrix(oracle::random_symmetric(d, rng));
    const auto e = symmetric_eigen(a);
    Matrix diff = reconstruct(e);
    for (std::size_t i = 0; i < diff.data().size(); ++i) diff(i / d, i % d) -= a.data()[i];
    EXPECT_LE(diff.norm_inf(), 1e-7 * a.norm_inf()) << "d=" << d;
    EXPECT_LE(max_abs_diff(e.vectors.transpose() * e.vectors, Matrix::identity(d)), 1e-9) << "d=" << d;
    for (int i = 1; i < d; ++i) EXPECT_GE(e.values[i - 1], e.values[i]);
  }
}

TEST(Eigen, SignConvention) {
  std::mt19937_64 rng(3);
  const auto e = symmetric_eigen(to_matrix(oracle::random_symmetric(6, rng)));
  for (int c = 0; c < 6; ++c) {
    int arg = 0;
    for (int r = 1; r < 6; ++r)
      if (std::abs(e.vectors(r, c)) > std::abs(e.vectors(arg, c))) arg = r;
    EXPECT_GT(e.vectors(arg, c), 0.0);
  }
}

TEST(Pca, IdenticalRowsProjectToOrigin) {
  const auto fit = pca_fit(rows({{1, 0, 1}, {1, 0, 1}, {1, 0, 1}}));
  for (const auto& p : fit.projection.points) {
    EXPECT_EQ(p[0], 0.0);
    EXPECT_EQ(p[1], 0.0);
  }
  EXPECT_EQ(fit.model.total_variance, 0.0);
}

TEST(Pca, TwoRows) {
  const auto fit = pca_fit(rows({{0, 0, 0}, {1, 1, 0}}));
  const double half = std::sqrt(2.0) / 2;
  EXPECT_NEAR(std::abs(fit.projection.points[0][0]), half, 1e-12);
  EXPECT_NEAR(fit.projection.points[0][0], -fit.projection.points[1][0], 1e-12);
  EXPECT_NEAR(std::abs(fit.model.components(0, 0)), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(fit.model.components(0, 0), fit.model.components(0, 1), 1e-12);
  EXPECT_EQ(kind_of([] { pca_fit(rows({{0, 1}})); }), ErrorKind::insufficient_data);
}

TEST(Pca, GeneralFourProperties) {
  const auto data = parity_dataset(general4());
  ASSERT_EQ(data.values.rows(), 880u);
  const auto fit = pca_fit(data);
  const double sum = std::accumulate(fit.model.eigenvalues.begin(), fit.model.eigenvalues.end(), 0.0);
  EXPECT_NEAR(sum, fit.model.total_variance, 1e-8 * fit.model.total_variance);
  for (double v : fit.model.eigenvalues) EXPECT_GE(v, 0.0);
  // orthonormal components
  const auto& c = fit.model.components;
  EXPECT_LE(max_abs_diff(c * c.transpose(), Matrix::identity(2)), 1e-9);
  // the mean row projects to the origin
  const auto origin = project_row(fit.model.mean, fit.model.mean, fit.model.components);
  EXPECT_EQ(origin[0], 0.0);
  EXPECT_EQ(origin[1], 0.0);
  // rows sharing a pattern share coordinates
  std::map<std::string, std::array<double, 2>> at;
  for (std::size_t i = 0; i < fit.projection.size(); ++i) {
    auto [it, fresh] = at.emplace(fit.projection.patterns[i], fit.projection.points[i]);
    if (!fresh) {
      EXPECT_EQ(it->second, fit.projection.points[i]);
    }
  }
  EXPECT_EQ(at.size(), 24u);
  EXPECT_LE(distinct_points(fit.projection.points).size(), 24u);
}

TEST(Lda, SingleClassRejected) {
  const std::vector<std::string> labels{"a", "a"};
  EXPECT_EQ(kind_of([&] { lda_fit(rows({{0, 1}, {1, 0}}), labels); }), ErrorKind::degenerate_labels);
}

TEST(Lda, ZeroWithinScatter) {
  const std::vector<std::string> labels{"a", "a", "b", "b"};
  const auto fit = lda_fit(rows({{0, 0, 1}, {0, 0, 1}, {1, 1, 0}, {1, 1, 0}}), labels);
  EXPECT_TRUE(fit.model.within_regularized);
  const auto& p = fit.projection.points;
  EXPECT_EQ(p[0][0], p[1][0]);
  EXPECT_EQ(p[2][0], p[3][0]);
  EXPECT_GT(std::abs(p[0][0] - p[2][0]), 1e-6);
  EXPECT_EQ(positive_eigenvalue_count(fit.model.eigenvalues), 1u);
  ASSERT_EQ(fit.model.null_direction.size(), 2u);
  EXPECT_FALSE(fit.model.null_direction[0]);
  EXPECT_TRUE(fit.model.null_direction[1]);
}

namespace {

struct GeneralFourLda {
  DataMatrix data;
  std::vector<std::string> labels;
  LdaResult fit;
};

const GeneralFourLda& general4_lda() {
  static const GeneralFourLda value = [] {
    GeneralFourLda v;
    v.data = parity_dataset(general4());
    v.labels = class_labels(general4());
    v.fit = lda_fit(v.data, v.labels);
    return v;
  }();
  return value;
}

}  // namespace

TEST(Lda, ScatterDecomposition) {
  const auto& [data, labels, fit] = general4_lda();
  const auto mean = column_mean(data.values);
  const double total = scatter(data.values, mean).trace();
  EXPECT_NEAR(fit.model.within.trace() + fit.model.between.trace(), total, 1e-8 * total);
  EXPECT_LE(positive_eigenvalue_count(fit.model.eigenvalues), fit.model.classes.size() - 1);
  EXPECT_EQ(fit.model.classes.size(), 8u);
}

// Reference values computed independently with a floating-point linear
// algebra package on the same labelled data.
TEST(Lda, GeneralFourMatchesReference) {
  const auto& [data, labels, fit] = general4_lda();
  EXPECT_EQ(fit.model.retained_rank, 8u);
  EXPECT_EQ(positive_eigenvalue_count(fit.model.eigenvalues), 5u);
  const double expected[] = {0.03621571, 0.02219434, 0.00605434, 0.00396825, 0.00304853};
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(fit.model.eigenvalues[k], expected[k], 1e-8);

  std::map<std::string, std::vector<std::array<double, 2>>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(fit.projection.points[i]);
  double max_radius = 0;
  std::map<std::string, std::array<double, 2>> centers;
  for (const auto& [label, pts] : by_class) {
    std::array<double, 2> c{0, 0};
    for (const auto& p : pts) c[0] += p[0] / pts.size(), c[1] += p[1] / pts.size();
    for (const auto& p : pts) max_radius = std::max(max_radius, std::hypot(p[0] - c[0], p[1] - c[1]));
    centers[label] = c;
  }
  EXPECT_NEAR(max_radius, 0.10959168936319144, 1e-9);

  // Both 48-square classes average exactly 1/2 in every cell, so no linear
  // map can pull their centers apart.
  for (auto label : {"0011010110101100", "0101110000111010"}) {
    const auto row = std::find(fit.model.classes.begin(), fit.model.classes.end(), label) - fit.model.classes.begin();
    for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(fit.model.class_means(row, j), 0.5, 1e-15);
  }
  const auto a = centers.at("0011010110101100"), b = centers.at("0101110000111010");
  EXPECT_NEAR(std::hypot(a[0] - b[0], a[1] - b[1]), 0.0, 1e-12);
}

TEST(Lda, RelabelingInvariance) {
  const auto& [data, labels, fit] = general4_lda();
  std::map<std::string, std::string> rename;
  int k = 0;
  for (const auto& c : fit.model.classes) rename[c] = "class-" + std::to_string(7 - k++);
  std::vector<std::string> renamed;
  for (const auto& l : labels) renamed.push_back(rename[l]);
  const auto again = lda_fit(data, renamed);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(again.projection.points[i][a], fit.projection.points[i][a], 1e-9);
}

TEST(Histogram, Examples) {
  const std::vector<double> v{0, 0, 1, 1};
  const auto h = histogram(v, 2);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{2, 2}));
  const std::vector<double> single{3.5};
  const auto one = histogram(single, 3);
  EXPECT_EQ(one.counts, (std::vector<std::uint64_t>{1}));
  EXPECT_EQ(kind_of([] { histogram(std::vector<double>{}, 3); }), ErrorKind::insufficient_data);
  std::vector<double> ramp(101);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  const auto r = histogram(ramp, 10);
  EXPECT_EQ(std::accumulate(r.counts.begin(), r.counts.end(), std::uint64_t{0}), 101u);
  EXPECT_EQ(r.counts.back(), 11u);  // rightmost bin closed
}

TEST(NormalOverlay, Examples) {
  const std::vector<double> v{-1, 1};
  const auto o = normal_overlay(v);
  EXPECT_DOUBLE_EQ(o.mean, 0.0);
  EXPECT_DOUBLE_EQ(o.stddev, std::sqrt(2.0));
  ASSERT_EQ(o.x.size(), 256u);
  double area = 0;
  for (std::size_t i = 1; i < o.x.size(); ++i) area += 0.5 * (o.density[i] + o.density[i - 1]) * (o.x[i] - o.x[i - 1]);
  EXPECT_NEAR(area, 1.0, 1e-3);
  EXPECT_EQ(kind_of([] { normal_overlay(std::vector<double>{2, 2, 2}); }), ErrorKind::degenerate_distribution);
  EXPECT_EQ(kind_of([] { normal_overlay(std::vector<double>{2}); }), ErrorKind::insufficient_data);
}

TEST(NormalOverlay, PeakAtMean) {
  std::vector<double> v{0.3, 1.7, 2.2, 2.9, 4.4, 5.0, 6.1};
  const auto o = normal_overlay(v);
  const auto peak = std::max_element(o.density.begin(), o.density.end()) - o.density.begin();
  const double step = o.x[1] - o.x[0];
  EXPECT_LE(std::abs(o.x[peak] - o.mean), step);
}

TEST(Regions, GridAndClusters) {
  const std::vector<std::array<double, 2>> pts{{0, 0}, {0, 0}, {1, 1}, {10, 10}, {10.2, 10}};
  const auto grid = density_grid(pts, 64);
  std::uint64_t total = 0;
  for (const auto& row : grid) total = std::accumulate(row.begin(), row.end(), total);
  EXPECT_EQ(total, pts.size());
  EXPECT_EQ(distinct_points(pts).size(), 4u);
  EXPECT_EQ(link_clusters(pts, 0.5), 3u);
  EXPECT_EQ(link_clusters(pts, 100), 1u);
}
