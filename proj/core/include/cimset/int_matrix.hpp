#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cimset/error.hpp"

namespace cimset {

// Overflow-checked 64-bit helpers; throw OverflowError instead of wrapping.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

// Dense row-major integer matrix with optional row/column legends.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::int64_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<std::int64_t> row(std::size_t r) const;
  std::vector<std::int64_t> column(std::size_t c) const;
  IntMatrix transposed() const;
  std::vector<std::int64_t> multiply(const std::vector<std::int64_t>& v) const;

  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows, std::size_t cols);
  static IntMatrix from_columns(const std::vector<std::vector<std::int64_t>>& cols, std::size_t rows);

  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> data_;
};

}  // namespace cimset
