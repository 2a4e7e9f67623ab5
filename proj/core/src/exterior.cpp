#include "slagfib/exterior.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace slagfib {

int degree_of(Mask m) { return std::popcount(m); }

std::vector<int> indices_of(Mask m) {
  std::vector<int> out;
  for (int a = 0; m != 0; ++a, m >>= 1) {
    if (m & 1u) out.push_back(a);
  }
  return out;
}

Mask mask_of(std::span<const int> indices) {
  Mask m = 0;
  for (int a : indices) m |= (Mask{1} << a);
  return m;
}

namespace {

struct MaskTable {
  std::array<std::array<std::vector<Mask>, 2 * kMaxDim + 1>, 2 * kMaxDim + 1> by_dim_degree;
  std::array<std::vector<int>, 2 * kMaxDim + 1> position;  // by dim, indexed by mask

  MaskTable() {
    for (int dim = 0; dim <= 2 * kMaxDim; ++dim) {
      const Mask full = (Mask{1} << dim);
      position[dim].assign(full, -1);
      for (int deg = 0; deg <= dim; ++deg) {
        std::vector<Mask> masks;
        for (Mask m = 0; m < full; ++m) {
          if (std::popcount(m) == deg) masks.push_back(m);
        }
        std::sort(masks.begin(), masks.end(), [](Mask a, Mask b) {
          return indices_of(a) < indices_of(b);
        });
        for (std::size_t i = 0; i < masks.size(); ++i) {
          position[dim][masks[i]] = static_cast<int>(i);
        }
        by_dim_degree[dim][deg] = std::move(masks);
      }
    }
  }
};

const MaskTable& table() {
  static const MaskTable t;
  return t;
}

}  // namespace

const std::vector<Mask>& masks_of_degree(int dim, int degree) {
  static const std::vector<Mask> empty;
  if (dim < 0 || dim > 2 * kMaxDim || degree < 0 || degree > dim) return empty;
  return table().by_dim_degree[dim][degree];
}

int mask_position(int dim, Mask m) {
  if (dim < 0 || dim > 2 * kMaxDim || m >= (Mask{1} << dim)) return -1;
  return table().position[dim][m];
}

int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  // Count pairs (i in a, j in b) with i > j: each needs one transposition.
  int swaps = 0;
  for (Mask bb = b; bb != 0; bb &= bb - 1) {
    const int j = std::countr_zero(bb);
    const Mask above = a & ~((Mask{2} << j) - 1);
    swaps += std::popcount(above);
  }
  return (swaps % 2 == 0) ? 1 : -1;
}

double small_det(const double* m, int k) {
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return m[0];
    case 2:
      return m[0] * m[3] - m[1] * m[2];
    case 3:
      return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
             m[2] * (m[3] * m[7] - m[4] * m[6]);
    default: {
      // Gaussian elimination with partial pivoting on a copy.
      std::array<double, 64> a{};
      std::copy(m, m + k * k, a.begin());
      double det = 1.0;
      for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r) {
          if (std::abs(a[r * k + c]) > std::abs(a[piv * k + c])) piv = r;
        }
        if (a[piv * k + c] == 0.0) return 0.0;
        if (piv != c) {
          for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
          det = -det;
        }
        det *= a[c * k + c];
        for (int r = c + 1; r < k; ++r) {
          const double f = a[r * k + c] / a[c * k + c];
          for (int j = c; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
        }
      }
      return det;
    }
  }
}

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace slagfib
