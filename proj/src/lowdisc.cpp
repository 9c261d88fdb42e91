#include "hola/lowdisc.hpp"

#include <Eigen/Cholesky>

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace hola {

namespace detail {
// Generated from data/sobol_direction_numbers.txt at configure time.
extern const char* const kSobolDirectionNumbers;
}  // namespace detail

// ---------------------------------------------------------------------------
// DirectionTable

const DirectionTable& DirectionTable::builtin() {
  static const DirectionTable table = [] {
    std::istringstream in(detail::kSobolDirectionNumbers);
    return parse(in);
  }();
  return table;
}

DirectionTable DirectionTable::parse(std::istream& in) {
  DirectionTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::uint64_t d = 0;
    if (!(fields >> d)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos || table.rows_.empty()) continue;
      throw std::runtime_error("direction table line " + std::to_string(line_no) + ": not a row");
    }
    if (d == 1) continue;
    if (d != table.rows_.size() + 2) {
      throw std::runtime_error("direction table line " + std::to_string(line_no) +
                               ": expected dimension " + std::to_string(table.rows_.size() + 2));
    }
    Row row;
    std::uint64_t a = 0;
    if (!(fields >> row.degree >> a) || row.degree == 0) {
      throw std::runtime_error("direction table line " + std::to_string(line_no) + ": bad s/a");
    }
    row.coeffs = static_cast<std::uint32_t>(a);
    for (unsigned i = 1; i <= row.degree; ++i) {
      std::uint64_t m = 0;
      if (!(fields >> m)) {
        throw std::runtime_error("direction table line " + std::to_string(line_no) +
                                 ": expected " + std::to_string(row.degree) + " m values");
      }
      if (i <= 32 && (m % 2 == 0 || m >= (std::uint64_t{1} << i))) {
        throw std::runtime_error("direction table line " + std::to_string(line_no) +
                                 ": m_" + std::to_string(i) + " must be odd and below 2^" +
                                 std::to_string(i));
      }
      row.initial.push_back(static_cast<std::uint32_t>(m));
    }
    table.rows_.push_back(std::move(row));
  }
  return table;
}

DirectionTable DirectionTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open direction table " + path.string());
  return parse(in);
}

// ---------------------------------------------------------------------------
// SobolStream

SobolStream::SobolStream(std::size_t dimension, const DirectionTable& table)
    : dim_(dimension), directions_(dimension * kBits), state_(dimension, 0) {
  if (dimension == 0) throw std::invalid_argument("Sobol dimension must be at least 1");
  if (dimension > table.max_dimension()) {
    throw std::invalid_argument("Sobol dimension " + std::to_string(dimension) +
                                " exceeds direction table size " +
                                std::to_string(table.max_dimension()));
  }
  for (int k = 0; k < kBits; ++k) directions_[k] = std::uint32_t{1} << (kBits - 1 - k);
  for (std::size_t j = 1; j < dimension; ++j) {
    const auto& row = table.row(j + 1);
    std::uint32_t* v = &directions_[j * kBits];
    const unsigned s = row.degree;
    const unsigned given = std::min<unsigned>(s, kBits);
    for (unsigned i = 0; i < given; ++i) v[i] = row.initial[i] << (kBits - 1 - i);
    for (unsigned i = s; i < static_cast<unsigned>(kBits); ++i) {
      v[i] = v[i - s] ^ (v[i - s] >> s);
      for (unsigned k = 1; k < s; ++k) {
        if ((row.coeffs >> (s - 1 - k)) & 1u) v[i] ^= v[i - k];
      }
    }
  }
}

void SobolStream::next(std::span<double> out) {
  if (out.size() != dim_) throw std::invalid_argument("Sobol output span has wrong dimension");
  if (index_ >= (std::uint64_t{1} << kBits) - 1) {
    throw std::out_of_range("Sobol sequence exhausted");
  }
  const auto c = static_cast<std::size_t>(std::countr_one(index_));
  ++index_;
  constexpr double scale = 1.0 / 4294967296.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    state_[j] ^= directions_[j * kBits + c];
    out[j] = static_cast<double>(state_[j]) * scale;
  }
}

std::vector<double> SobolStream::next() {
  std::vector<double> out(dim_);
  next(out);
  return out;
}

void SobolStream::seek(std::uint64_t index) {
  if (index >= (std::uint64_t{1} << kBits)) throw std::out_of_range("Sobol index too large");
  const std::uint64_t gray = index ^ (index >> 1);
  for (std::size_t j = 0; j < dim_; ++j) {
    std::uint32_t x = 0;
    for (int k = 0; k < kBits; ++k) {
      if ((gray >> k) & 1u) x ^= directions_[j * kBits + k];
    }
    state_[j] = x;
  }
  index_ = index;
}

// ---------------------------------------------------------------------------
// Normal distribution

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Rational approximation of the lower-tail quantile for p in (0, 0.5]
// (P. J. Acklam), relative error about 1.15e-9.
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("inverse_normal_cdf: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  // Work in the lower tail so the Newton residual keeps full relative
  // precision; 1 - p is exact for p in [0.5, 1).
  const bool upper = p > 0.5;
  const double tail = upper ? 1.0 - p : p;
  double x = acklam_lower(tail);
  const double residual = 0.5 * std::erfc(-x / std::numbers::sqrt2) - tail;
  x -= residual * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return upper ? -x : x;
}

// ---------------------------------------------------------------------------
// GaussTransform

GaussTransform::GaussTransform(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance)
    : mean_(std::move(mean)) {
  if (covariance.rows() != mean_.size() || covariance.cols() != mean_.size()) {
    throw std::invalid_argument("GaussTransform: covariance shape does not match mean");
  }
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if (!covariance.isApprox(covariance.transpose(), 1e-12) &&
      (covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("GaussTransform: covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("GaussTransform: covariance is not positive definite");
  }
  factor_ = llt.matrixL();
}

Eigen::VectorXd GaussTransform::apply(const Eigen::VectorXd& standard_normal) const {
  if (standard_normal.size() != mean_.size()) {
    throw std::invalid_argument("GaussTransform: dimension mismatch");
  }
  return mean_ + factor_ * standard_normal;
}

Eigen::VectorXd gauss_sobol_next(SobolStream& stream, const GaussTransform& transform) {
  if (stream.dimension() != transform.dimension()) {
    throw std::invalid_argument("gauss_sobol_next: stream and transform dimensions differ");
  }
  Eigen::VectorXd g(static_cast<Eigen::Index>(stream.dimension()));
  stream.next(std::span<double>(g.data(), stream.dimension()));
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = inverse_normal_cdf(g[i]);
  return transform.apply(g);
}

}  // namespace hola
