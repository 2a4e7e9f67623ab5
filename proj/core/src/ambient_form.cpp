#include "slagfib/ambient_form.hpp"

#include <cmath>

#include "slagfib/errors.hpp"

namespace slagfib {

AmbientForm::AmbientForm(Lattice lattice, int degree, double domain_radius)
    : lattice_(std::move(lattice)), degree_(degree), radius_(domain_radius) {
  if (degree < 0 || degree > 2 * lattice_.dim()) {
    throw InvalidInput("ambient form degree " + std::to_string(degree) + " outside 0.." +
                       std::to_string(2 * lattice_.dim()));
  }
  if (!(domain_radius > 0.0)) throw InvalidInput("ambient domain radius must be positive");
}

void AmbientForm::add(const TermKey& key, cplx value) {
  if (degree_of(key.mask) != degree_) throw InvalidInput("term multi-index does not match form degree");
  if (key.mask >= (Mask{1} << (2 * dim()))) throw InvalidInput("term multi-index out of range");
  for (int i = 0; i < dim(); ++i) {
    if (key.m[i] < 0) throw InvalidInput("negative monomial exponent");
  }
  for (int i = dim(); i < kMaxDim; ++i) {
    if (key.k[i] != 0 || key.m[i] != 0) throw InvalidInput("term index beyond the dimension");
  }
  if (value == cplx{}) return;
  auto [it, inserted] = terms_.try_emplace(key, value);
  if (!inserted) {
    it->second += value;
    if (it->second == cplx{}) terms_.erase(it);
  }
}

void AmbientForm::add_constant(Mask mask, cplx value) {
  TermKey key;
  key.mask = mask;
  add(key, value);
}

cplx AmbientForm::coefficient(const TermKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? cplx{} : it->second;
}

std::vector<cplx> AmbientForm::evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  const int n = dim();
  const int big = 2 * n;
  std::vector<cplx> out(masks_of_degree(big, degree_).size());
  for (const auto& [key, c] : terms_) {
    const Eigen::VectorXd xi = lattice_.wave_vector(std::span<const int>(key.k.data(), n));
    const double arg = xi.dot(x);
    double mono = 1.0;
    for (int l = 0; l < n; ++l) mono *= std::pow(y(l), key.m[l]);
    out[static_cast<std::size_t>(mask_position(big, key.mask))] +=
        c * cplx(std::cos(arg), std::sin(arg)) * mono;
  }
  return out;
}

int AmbientForm::max_poly_degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_) {
    int s = 0;
    for (int l = 0; l < dim(); ++l) s += key.m[l];
    d = std::max(d, s);
  }
  return d;
}

int AmbientForm::max_frequency() const {
  int f = 0;
  for (const auto& [key, c] : terms_) {
    for (int l = 0; l < dim(); ++l) f = std::max(f, std::abs(key.k[l]));
  }
  return f;
}

double AmbientForm::reality_defect() const {
  return max_abs_difference(conjugate());
}

void AmbientForm::check_compatible(const AmbientForm& o) const {
  if (degree_ != o.degree_ || !(lattice_ == o.lattice_)) {
    throw InvalidInput("combining ambient forms of different degree or lattice");
  }
}

AmbientForm& AmbientForm::operator+=(const AmbientForm& o) {
  check_compatible(o);
  for (const auto& [key, c] : o.terms_) add(key, c);
  return *this;
}

AmbientForm& AmbientForm::operator-=(const AmbientForm& o) {
  check_compatible(o);
  for (const auto& [key, c] : o.terms_) add(key, -c);
  return *this;
}

AmbientForm& AmbientForm::operator*=(cplx s) {
  if (s == cplx{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, c] : terms_) c *= s;
  return *this;
}

AmbientForm AmbientForm::conjugate() const {
  AmbientForm out(lattice_, degree_, radius_);
  for (const auto& [key, c] : terms_) {
    TermKey k2 = key;
    for (int l = 0; l < dim(); ++l) k2.k[l] = -key.k[l];
    out.add(k2, std::conj(c));
  }
  return out;
}

AmbientForm AmbientForm::real_part() const {
  AmbientForm out = *this;
  out += conjugate();
  out *= 0.5;
  out.prune();
  return out;
}

AmbientForm AmbientForm::imag_part() const {
  AmbientForm out = *this;
  out -= conjugate();
  out *= cplx(0.0, -0.5);
  out.prune();
  return out;
}

void AmbientForm::prune(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= tol) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

double AmbientForm::max_abs_difference(const AmbientForm& o) const {
  double d = 0.0;
  for (const auto& [key, c] : terms_) d = std::max(d, std::abs(c - o.coefficient(key)));
  for (const auto& [key, c] : o.terms_) {
    if (!terms_.contains(key)) d = std::max(d, std::abs(c));
  }
  return d;
}

double AmbientForm::max_abs() const {
  double d = 0.0;
  for (const auto& [key, c] : terms_) d = std::max(d, std::abs(c));
  return d;
}

AmbientForm operator+(AmbientForm a, const AmbientForm& b) { return a += b; }
AmbientForm operator-(AmbientForm a, const AmbientForm& b) { return a -= b; }
AmbientForm operator*(cplx s, AmbientForm a) { return a *= s; }

AmbientForm exterior_derivative(const AmbientForm& form) {
  const int n = form.dim();
  if (form.degree() >= 2 * n) throw InvalidInput("exterior derivative of a top-degree ambient form");
  AmbientForm out(form.lattice(), form.degree() + 1, form.domain_radius());
  for (const auto& [key, c] : form.terms()) {
    const Eigen::VectorXd xi = form.lattice().wave_vector(std::span<const int>(key.k.data(), n));
    for (int a = 0; a < n; ++a) {
      const Mask ea = Mask{1} << a;
      const int sign = wedge_sign(ea, key.mask);
      if (sign == 0 || xi(a) == 0.0) continue;
      TermKey k2 = key;
      k2.mask |= ea;
      out.add(k2, static_cast<double>(sign) * cplx(0.0, xi(a)) * c);
    }
    for (int l = 0; l < n; ++l) {
      if (key.m[l] == 0) continue;
      const Mask el = Mask{1} << (n + l);
      const int sign = wedge_sign(el, key.mask);
      if (sign == 0) continue;
      TermKey k2 = key;
      k2.mask |= el;
      k2.m[l] -= 1;
      out.add(k2, static_cast<double>(sign * key.m[l]) * c);
    }
  }
  return out;
}

AmbientForm wedge(const AmbientForm& a, const AmbientForm& b) {
  if (!(a.lattice() == b.lattice())) throw InvalidInput("wedge of ambient forms on different lattices");
  const int n = a.dim();
  if (a.degree() + b.degree() > 2 * n) throw InvalidInput("wedge degree exceeds the ambient dimension");
  AmbientForm out(a.lattice(), a.degree() + b.degree(), std::min(a.domain_radius(), b.domain_radius()));
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      const int sign = wedge_sign(ka.mask, kb.mask);
      if (sign == 0) continue;
      TermKey k;
      for (int l = 0; l < n; ++l) {
        k.k[l] = ka.k[l] + kb.k[l];
        k.m[l] = ka.m[l] + kb.m[l];
      }
      k.mask = ka.mask | kb.mask;
      out.add(k, static_cast<double>(sign) * ca * cb);
    }
  }
  return out;
}

std::vector<cplx> wedge_pointwise(int dim, int deg_a, const std::vector<cplx>& a, int deg_b,
                                  const std::vector<cplx>& b) {
  const auto& ma = masks_of_degree(dim, deg_a);
  const auto& mb = masks_of_degree(dim, deg_b);
  std::vector<cplx> out(masks_of_degree(dim, deg_a + deg_b).size());
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (a[i] == cplx{}) continue;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      const int sign = wedge_sign(ma[i], mb[j]);
      if (sign == 0) continue;
      out[static_cast<std::size_t>(mask_position(dim, ma[i] | mb[j]))] +=
          static_cast<double>(sign) * a[i] * b[j];
    }
  }
  return out;
}

}  // namespace slagfib
