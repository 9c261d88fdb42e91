#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace hola {

/// Sobol direction-number table (Joe-Kuo layout).
///
/// Text format, one row per dimension starting at d = 2 (dimension 1 is the
/// van der Corput sequence and needs no row):
///
///     d s a m_1 ... m_s
///
/// A leading non-numeric header line is skipped.
class DirectionTable {
 public:
  struct Row {
    unsigned degree = 0;        // s
    std::uint32_t coeffs = 0;   // a
    std::vector<std::uint32_t> initial;  // m_1..m_s
  };

  static const DirectionTable& builtin();
  static DirectionTable parse(std::istream& in);
  static DirectionTable load(const std::filesystem::path& path);

  std::size_t max_dimension() const { return rows_.size() + 1; }
  const Row& row(std::size_t dim) const { return rows_.at(dim - 2); }

 private:
  std::vector<Row> rows_;
};

/// Unscrambled Sobol sequence in Gray-code order. The all-zeros element is
/// skipped, so the first point is (0.5, ..., 0.5).
class SobolStream {
 public:
  static constexpr int kBits = 32;

  explicit SobolStream(std::size_t dimension,
                       const DirectionTable& table = DirectionTable::builtin());

  std::size_t dimension() const { return dim_; }
  /// Index of the most recently returned element (0 before the first call).
  std::uint64_t index() const { return index_; }

  std::vector<double> next();
  void next(std::span<double> out);

  /// Position the stream so the next call returns element `index + 1`.
  void seek(std::uint64_t index);

 private:
  std::size_t dim_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> directions_;  // dim_ x kBits, row-major
  std::vector<std::uint32_t> state_;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile. Throws std::domain_error unless 0 < p < 1.
double inverse_normal_cdf(double p);

/// Affine map g -> mean + A g with A A^T = covariance (Cholesky factor).
class GaussTransform {
 public:
  GaussTransform(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance);

  std::size_t dimension() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& factor() const { return factor_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& standard_normal) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
};

/// Next Sobol point pushed through the inverse normal CDF and `transform`.
Eigen::VectorXd gauss_sobol_next(SobolStream& stream, const GaussTransform& transform);

}  // namespace hola
