#pragma once

#include "qmf/common.hpp"

#include <cstdint>
#include <vector>

namespace qmf {

/// Dense GF(2) matrix with rows packed into 64-bit words.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64),
        data_(static_cast<std::size_t>(rows) * words_, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool get(int r, int c) const { return (row(r)[c >> 6] >> (c & 63)) & 1u; }
  void set(int r, int c, bool v) {
    auto& w = row(r)[c >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (c & 63);
    w = v ? (w | bit) : (w & ~bit);
  }
  void flip(int r, int c) { row(r)[c >> 6] ^= std::uint64_t{1} << (c & 63); }

  void xor_row_into(int src, int dst) {
    const std::uint64_t* s = row(src);
    std::uint64_t* d = row(dst);
    for (int w = 0; w < words_; ++w) d[w] ^= s[w];
  }
  void swap_rows(int a, int b);

  std::uint64_t* row(int r) { return data_.data() + static_cast<std::size_t>(r) * words_; }
  const std::uint64_t* row(int r) const {
    return data_.data() + static_cast<std::size_t>(r) * words_;
  }

  /// y = A x over GF(2).
  BitVector multiply(const BitVector& x) const;

  /// In-place reduced row echelon form. Returns the pivot column per pivot row.
  std::vector<int> reduce();

 private:
  int rows_ = 0;
  int cols_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> data_;
};

}  // namespace qmf
