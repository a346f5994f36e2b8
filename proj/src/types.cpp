#include "holonomy/types.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace holonomy {

ParameterPoint::ParameterPoint(std::initializer_list<std::pair<std::string, double>> coords) {
  for (const auto& [name, value] : coords) set(name, value);
}

void ParameterPoint::set(std::string_view name, double value) {
  if (name.empty()) throw InvalidInput("parameter name must be non-empty");
  if (!std::isfinite(value))
    throw InvalidInput("non-finite value for parameter '" + std::string(name) + "'");
  for (auto& [n, v] : coords_) {
    if (n == name) throw InvalidInput("duplicate parameter '" + std::string(name) + "'");
  }
  coords_.emplace_back(std::string(name), value);
}

bool ParameterPoint::has(std::string_view name) const {
  return std::any_of(coords_.begin(), coords_.end(),
                     [&](const auto& c) { return c.first == name; });
}

double ParameterPoint::value(std::string_view name) const {
  for (const auto& [n, v] : coords_) {
    if (n == name) return v;
  }
  throw InvalidInput("parameter '" + std::string(name) + "' not present in point");
}

void ParameterPoint::assign(std::string_view name, double value) {
  if (!std::isfinite(value))
    throw InvalidInput("non-finite value for parameter '" + std::string(name) + "'");
  for (auto& [n, v] : coords_) {
    if (n == name) {
      v = value;
      return;
    }
  }
  throw InvalidInput("parameter '" + std::string(name) + "' not present in point");
}

ParameterPoint ParameterPoint::with(std::string_view name, double value) const {
  if (!std::isfinite(value))
    throw InvalidInput("non-finite value for parameter '" + std::string(name) + "'");
  ParameterPoint out = *this;
  for (auto& [n, v] : out.coords_) {
    if (n == name) {
      v = value;
      return out;
    }
  }
  throw InvalidInput("parameter '" + std::string(name) + "' not present in point");
}

std::vector<std::string> ParameterPoint::names() const {
  std::vector<std::string> out;
  out.reserve(coords_.size());
  for (const auto& [n, v] : coords_) out.push_back(n);
  return out;
}

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

unsigned worker_thread_count() {
  if (const char* env = std::getenv("HOLONOMY_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

HermitianOperator::HermitianOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw InvalidInput("Hermitian operator must be square");
  const double scale = std::max(1.0, max_abs(m_));
  const double dev = max_abs(m_ - m_.adjoint());
  if (dev > kHermTol * scale)
    throw InvalidInput("matrix is not Hermitian (max deviation " + std::to_string(dev) + ")");
}

}  // namespace holonomy
