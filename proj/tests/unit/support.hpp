#pragma once

// Hand-rolled generators and small oracles shared by the unit suites.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qnn/quantum_core.hpp"

namespace qnn::testing {

using Gen = std::mt19937_64;

inline Vector gaussian(Gen& gen, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (auto& e : v) e = g(gen);
  return v;
}

inline std::vector<Complex> complex_gaussian(Gen& gen, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Complex> v(n);
  for (auto& e : v) e = {g(gen), g(gen)};
  return v;
}

inline QState random_state(Gen& gen, int k) { return QState::normalized(complex_gaussian(gen, std::size_t{1} << k)); }

inline int uniform_int(Gen& gen, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }

/// sum_i conj(a_i) b_i written out longhand.
inline Complex dot(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Dense Kronecker product of two square or column matrices (row-major).
inline std::vector<Complex> kron(const std::vector<Complex>& a, std::size_t ar, std::size_t ac,
                                 const std::vector<Complex>& b, std::size_t br, std::size_t bc) {
  std::vector<Complex> out(ar * br * ac * bc);
  for (std::size_t i = 0; i < ar; ++i)
    for (std::size_t j = 0; j < ac; ++j)
      for (std::size_t k = 0; k < br; ++k)
        for (std::size_t l = 0; l < bc; ++l) out[(i * br + k) * (ac * bc) + j * bc + l] = a[i * ac + j] * b[k * bc + l];
  return out;
}

/// Product of dense row-major matrices.
inline std::vector<Complex> matmul(const std::vector<Complex>& a, const std::vector<Complex>& b, std::size_t n) {
  std::vector<Complex> out(n * n, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += a[i * n + k] * b[k * n + j];
  return out;
}

inline std::vector<Complex> matvec(const std::vector<Complex>& m, const std::vector<Complex>& v) {
  const std::size_t n = v.size();
  std::vector<Complex> out(n, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += m[i * n + j] * v[j];
  return out;
}

/// Permutation matrix of a basis-index map.
template <class F>
std::vector<Complex> permutation_matrix(std::size_t n, F&& image) {
  std::vector<Complex> m(n * n, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) m[image(j) * n + j] = 1.0;
  return m;
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e;
  return s / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double e : v) s += (e - m) * (e - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace qnn::testing
