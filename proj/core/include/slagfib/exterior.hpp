#pragma once

// Multi-indices of exterior algebra basis elements, encoded as bitmasks.
// Bit a set means the basis covector e_a is present; products are ordered
// by increasing index.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace slagfib {

using Mask = std::uint32_t;

inline constexpr int kMaxDim = 4;  // torus dimension cap; ambient has 2n <= 8

int degree_of(Mask m);
std::vector<int> indices_of(Mask m);
Mask mask_of(std::span<const int> indices);

/// All masks of the given degree over {0..dim-1}, sorted lexicographically
/// by their increasing index tuples.
const std::vector<Mask>& masks_of_degree(int dim, int degree);

/// Position of `m` in masks_of_degree(dim, degree_of(m)), or -1.
int mask_position(int dim, Mask m);

/// e_I ^ e_J = sign * e_{I|J}; returns 0 when I and J overlap.
int wedge_sign(Mask a, Mask b);

/// Determinant of a small k x k row-major matrix (k <= 2 * kMaxDim).
double small_det(const double* m, int k);

/// n choose k.
long binomial(int n, int k);

}  // namespace slagfib
