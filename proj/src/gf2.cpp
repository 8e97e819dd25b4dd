#include "qmf/gf2.hpp"

#include <algorithm>

namespace qmf {

void BitMatrix::swap_rows(int a, int b) {
  if (a == b) return;
  std::swap_ranges(row(a), row(a) + words_, row(b));
}

BitVector BitMatrix::multiply(const BitVector& x) const {
  if (static_cast<int>(x.size()) != cols_) throw InvalidArgument("BitMatrix::multiply: size");
  BitVector y(rows_, 0);
  for (int r = 0; r < rows_; ++r) {
    unsigned acc = 0;
    for (int c = 0; c < cols_; ++c) acc ^= (x[c] & 1u) & static_cast<unsigned>(get(r, c));
    y[r] = static_cast<std::uint8_t>(acc);
  }
  return y;
}

std::vector<int> BitMatrix::reduce() {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < cols_ && r < rows_; ++c) {
    int p = -1;
    for (int i = r; i < rows_; ++i)
      if (get(i, c)) {
        p = i;
        break;
      }
    if (p < 0) continue;
    swap_rows(p, r);
    for (int i = 0; i < rows_; ++i)
      if (i != r && get(i, c)) xor_row_into(r, i);
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace qmf
