// Core value types shared by every module: parameter-space points, validated
// Hermitian operators, and the two error categories the CLI maps to exit codes.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace holonomy {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Bad input: unknown parameters, malformed configs, violated preconditions.
// The CLI reports these with exit code 1.
struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// A computation that started from valid input but lost numerical meaning:
// degeneracy structure changed mid-path, overlaps fell below tolerance, norm
// drifted, a path grazed a field singularity. CLI exit code 2.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// An ordered list of named real coordinates in parameter space. Order matters
// for schema checks and for stable serialization, so this is a vector of
// (name, value) pairs rather than a map.
class ParameterPoint {
 public:
  ParameterPoint() = default;
  ParameterPoint(std::initializer_list<std::pair<std::string, double>> coords);

  // Appends a coordinate; rejects duplicates and non-finite values.
  void set(std::string_view name, double value);

  bool has(std::string_view name) const;
  double value(std::string_view name) const;  // throws InvalidInput if absent
  // Copy with one coordinate replaced (used heavily by finite differencing).
  ParameterPoint with(std::string_view name, double value) const;
  // In-place update of an existing coordinate (allocation-free inner loops).
  void assign(std::string_view name, double value);

  std::size_t size() const { return coords_.size(); }
  const std::vector<std::pair<std::string, double>>& coords() const { return coords_; }

  // Names in order, for schema comparison.
  std::vector<std::string> names() const;

  bool operator==(const ParameterPoint& other) const { return coords_ == other.coords_; }

 private:
  std::vector<std::pair<std::string, double>> coords_;
};

// A square complex matrix checked to be Hermitian on construction:
// max|H - H^dag| <= tol * max(1, max|H_ij|). Every Hamiltonian evaluation and
// gradient flows through this type, so downstream code can assume symmetry.
class HermitianOperator {
 public:
  static constexpr double kHermTol = 1e-12;

  explicit HermitianOperator(Matrix m);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

// Largest absolute entry; zero for empty matrices.
double max_abs(const Matrix& m);

// Worker-thread cap: the HOLONOMY_THREADS environment variable when set to a
// positive integer, otherwise the hardware concurrency (at least 1).
unsigned worker_thread_count();

inline bool approx_equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace holonomy
