#include "slagfib/group_action.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "slagfib/errors.hpp"

namespace slagfib {

namespace {

constexpr double kTol = 1e-9;

bool close(const GroupElement& a, const GroupElement& b, const Lattice& lattice) {
  if ((a.A - b.A).norm() > kTol || (a.B - b.B).norm() > kTol) return false;
  // Translations agree modulo the lattice.
  Eigen::VectorXd du = lattice.inverse_basis() * (a.t - b.t);
  for (int i = 0; i < du.size(); ++i) {
    if (std::abs(du(i) - std::round(du(i))) > kTol) return false;
  }
  return true;
}

/// Integer matrix of A in lattice coordinates; throws if A is incompatible.
Eigen::MatrixXi lattice_matrix(const Lattice& lattice, const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd M = lattice.inverse_basis() * A * lattice.basis();
  Eigen::MatrixXi Mi(M.rows(), M.cols());
  for (int r = 0; r < M.rows(); ++r) {
    for (int c = 0; c < M.cols(); ++c) {
      Mi(r, c) = static_cast<int>(std::lround(M(r, c)));
      if (std::abs(M(r, c) - Mi(r, c)) > kTol) throw InvalidInput("torus map does not preserve the lattice");
    }
  }
  if (std::abs(std::abs(M.determinant()) - 1.0) > kTol) {
    throw InvalidInput("torus map is not invertible on the lattice");
  }
  return Mi;
}

using Poly = std::map<std::array<int, kMaxDim>, double>;

/// (sum_q B_{lq} y_q)^e expanded as a polynomial in y.
Poly linear_power(const Eigen::MatrixXd& B, int l, int e) {
  Poly out;
  out[{}] = 1.0;
  const int n = static_cast<int>(B.rows());
  for (int step = 0; step < e; ++step) {
    Poly next;
    for (const auto& [m, c] : out) {
      for (int q = 0; q < n; ++q) {
        if (B(l, q) == 0.0) continue;
        auto m2 = m;
        ++m2[q];
        next[m2] += c * B(l, q);
      }
    }
    out = std::move(next);
  }
  return out;
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      std::array<int, kMaxDim> m{};
      for (int i = 0; i < kMaxDim; ++i) m[i] = ma[i] + mb[i];
      out[m] += ca * cb;
    }
  }
  return out;
}

/// Coefficients of the pullback of e_I under the linear map with matrix M
/// (rows index source covectors): e_I -> sum_J det(M[I, J]) e_J.
std::vector<std::pair<Mask, double>> pull_covector(const Eigen::MatrixXd& M, Mask I, int dim) {
  const auto rows = indices_of(I);
  const int k = static_cast<int>(rows.size());
  std::vector<std::pair<Mask, double>> out;
  if (k == 0) {
    out.emplace_back(0, 1.0);
    return out;
  }
  std::vector<double> minor(static_cast<std::size_t>(k * k));
  for (Mask J : masks_of_degree(dim, k)) {
    const auto cols = indices_of(J);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) minor[r * k + c] = M(rows[r], cols[c]);
    }
    const double det = small_det(minor.data(), k);
    if (det != 0.0) out.emplace_back(J, det);
  }
  return out;
}

}  // namespace

bool lattice_compatible(const Lattice& lattice, const GroupElement& g, double) {
  try {
    lattice_matrix(lattice, g.A);
    return true;
  } catch (const InvalidInput&) {
    return false;
  }
}

bool preserves_flat_structure(const GroupElement& g, double tol) {
  const int n = static_cast<int>(g.A.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  return (g.A.transpose() * g.A - I).cwiseAbs().maxCoeff() <= tol && (g.B - g.A).cwiseAbs().maxCoeff() <= tol &&
         std::abs(g.A.determinant() - 1.0) <= tol;
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
  return {a.A * b.A, a.A * b.t + a.t, a.B * b.B};
}

GroupElement inverse(const GroupElement& g) {
  const Eigen::MatrixXd Ai = g.A.inverse();
  return {Ai, -Ai * g.t, g.B.inverse()};
}

GroupAction::GroupAction(Lattice lattice, std::vector<GroupElement> elements, std::string name)
    : lattice_(std::move(lattice)), elements_(std::move(elements)), name_(std::move(name)) {
  const int n = lattice_.dim();
  if (elements_.empty()) throw InvalidInput("group needs at least the identity");
  for (const auto& g : elements_) {
    if (g.A.rows() != n || g.A.cols() != n || g.B.rows() != n || g.B.cols() != n || g.t.size() != n) {
      throw InvalidInput("group element has wrong dimensions");
    }
    lattice_matrix(lattice_, g.A);
  }
  const GroupElement id{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n),
                        Eigen::MatrixXd::Identity(n, n)};
  if (!close(elements_[0], id, lattice_)) throw InvalidInput("element 0 must be the identity");
  const std::size_t N = elements_.size();
  table_.assign(N, std::vector<std::size_t>(N, 0));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const GroupElement p = compose(elements_[i], elements_[j]);
      std::size_t found = N;
      for (std::size_t q = 0; q < N; ++q) {
        if (close(p, elements_[q], lattice_)) found = q;
      }
      if (found == N) throw InvalidInput("element list is not closed under composition");
      table_[i][j] = found;
    }
  }
  for (std::size_t i = 0; i < N; ++i) inverse_of(i);
}

std::size_t GroupAction::inverse_of(std::size_t i) const {
  for (std::size_t j = 0; j < table_.size(); ++j) {
    if (table_[i][j] == 0) return j;
  }
  throw InvalidInput("group element has no inverse in the list");
}

GroupAction GroupAction::trivial(const Lattice& lattice) {
  const int n = lattice.dim();
  return GroupAction(lattice,
                     {{Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)}},
                     "none");
}

GroupAction GroupAction::flip(const Lattice& lattice) {
  const int n = lattice.dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  return GroupAction(lattice, {{I, Eigen::VectorXd::Zero(n), I}, {-I, Eigen::VectorXd::Zero(n), -I}}, "flip");
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> act_on_point(const GroupElement& g, const Eigen::VectorXd& x,
                                                           const Eigen::VectorXd& y) {
  return {g.A * x + g.t, g.B * y};
}

AmbientForm pull_back(const GroupElement& g, const AmbientForm& form, const Lattice& lattice) {
  const int n = form.dim();
  const Eigen::MatrixXi M = lattice_matrix(lattice, g.A);
  // Covector map of (x, y) -> (A x + t, B y): dx_a -> sum_b A_ab dx_b, dy_l -> sum_q B_lq dy_q.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topLeftCorner(n, n) = g.A;
  J.bottomRightCorner(n, n) = g.B;
  const Eigen::VectorXd tu = lattice.inverse_basis() * g.t;

  AmbientForm out(lattice, form.degree(), form.domain_radius());
  for (const auto& [key, c] : form.terms()) {
    // exp(2 pi i k.u) with u -> M u + tu gives k' = M^T k and phase exp(2 pi i k.tu).
    TermKey base;
    double phase = 0.0;
    for (int a = 0; a < n; ++a) {
      int kp = 0;
      for (int b = 0; b < n; ++b) kp += M(b, a) * key.k[b];
      base.k[a] = kp;
      phase += key.k[a] * tu(a);
    }
    const cplx cc = c * std::polar(1.0, 2.0 * std::numbers::pi * phase);
    Poly poly;
    poly[{}] = 1.0;
    for (int l = 0; l < n; ++l) {
      if (key.m[l] > 0) poly = multiply(poly, linear_power(g.B, l, key.m[l]));
    }
    const auto covs = pull_covector(J, key.mask, 2 * n);
    for (const auto& [m, pc] : poly) {
      if (pc == 0.0) continue;
      for (const auto& [mask, det] : covs) {
        TermKey k2 = base;
        k2.m = m;
        k2.mask = mask;
        out.add(k2, cc * pc * det);
      }
    }
  }
  out.prune(1e-15 * std::max(1.0, form.max_abs()));
  return out;
}

TorusForm push_forward(const GroupElement& g, const TorusForm& form) {
  // (g^{-1})^* for x -> A x + t: f(x) -> f(A^{-1}(x' - t)), dx_I -> minors of A^{-1}.
  const Lattice& lattice = form.lattice();
  const int n = form.dim();
  const GroupElement gi = inverse(g);
  const Eigen::MatrixXi Mi = lattice_matrix(lattice, gi.A);
  const Eigen::VectorXd tu = lattice.inverse_basis() * gi.t;
  TorusForm out(form.basis(), form.degree());
  const auto& comps = form.components();
  std::vector<std::vector<std::pair<Mask, double>>> covs;
  for (Mask I : comps) covs.push_back(pull_covector(gi.A, I, n));
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (std::size_t m = 0; m < form.num_modes(); ++m) {
      const cplx v = form.at(c, m);
      if (v == cplx{}) continue;
      const auto k = form.basis()->mode(m);
      std::vector<int> kp(n, 0);
      double phase = 0.0;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) kp[a] += Mi(b, a) * k[b];
        phase += k[a] * tu(a);
      }
      if (form.basis()->mode_index(kp) == FourierBasis::npos) {
        throw InvalidInput("group element maps a retained frequency beyond the cutoff");
      }
      const cplx vv = v * std::polar(1.0, 2.0 * std::numbers::pi * phase);
      for (const auto& [mask, det] : covs[c]) out.set(kp, mask, out.coeff(kp, mask) + vv * det);
    }
  }
  return out;
}

TorusForm act_on_section(const GroupElement& g, const TorusForm& sigma) {
  if (sigma.degree() != 1) throw InvalidInput("sections are 1-forms");
  if ((g.B - g.A).cwiseAbs().maxCoeff() > kTol ||
      (g.A.transpose() * g.A - Eigen::MatrixXd::Identity(g.A.rows(), g.A.cols())).cwiseAbs().maxCoeff() > kTol) {
    throw InvalidInput("section action needs B = A orthogonal");
  }
  // For orthogonal A the covector pullback by A^{-1} equals B acting on the vector sigma.
  return push_forward(g, sigma);
}

AmbientForm average(const GroupAction& action, const AmbientForm& form) {
  AmbientForm sum(form.lattice(), form.degree(), form.domain_radius());
  for (const auto& g : action.elements()) sum += pull_back(g, form, action.lattice());
  sum *= cplx(1.0 / static_cast<double>(action.size()), 0.0);
  sum.prune(1e-15 * std::max(1.0, form.max_abs()));
  return sum;
}

double invariance_defect(const GroupAction& action, const AmbientForm& form) {
  double worst = 0.0;
  for (const auto& g : action.elements()) {
    worst = std::max(worst, pull_back(g, form, action.lattice()).max_abs_difference(form));
  }
  return worst;
}

}  // namespace slagfib
