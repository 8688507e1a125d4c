#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fluxbench {

/// Row-major feature matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {}

  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
};

}  // namespace fluxbench
