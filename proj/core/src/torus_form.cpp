#include "slagfib/torus_form.hpp"

#include <algorithm>
#include <cmath>

#include "slagfib/errors.hpp"

namespace slagfib {

FourierBasis::FourierBasis(Lattice lattice, int cutoff) : lattice_(std::move(lattice)), cutoff_(cutoff) {
  if (cutoff < 0) throw InvalidInput("negative Fourier cutoff");
  const int n = lattice_.dim();
  num_modes_ = 1;
  for (int i = 0; i < n; ++i) num_modes_ *= static_cast<std::size_t>(2 * cutoff + 1);
  waves_.resize(num_modes_ * n);
  for (std::size_t m = 0; m < num_modes_; ++m) {
    const auto k = mode(m);
    const Eigen::VectorXd xi = lattice_.wave_vector(k);
    for (int a = 0; a < n; ++a) waves_[m * n + a] = xi(a);
  }
}

std::vector<int> FourierBasis::mode(std::size_t index) const {
  const int n = dim();
  std::vector<int> k(n);
  const auto w = static_cast<std::size_t>(2 * cutoff_ + 1);
  for (int i = n - 1; i >= 0; --i) {
    k[i] = static_cast<int>(index % w) - cutoff_;
    index /= w;
  }
  return k;
}

std::size_t FourierBasis::mode_index(std::span<const int> k) const {
  std::size_t idx = 0;
  for (int i = 0; i < dim(); ++i) {
    if (k[i] < -cutoff_ || k[i] > cutoff_) return npos;
    idx = idx * static_cast<std::size_t>(2 * cutoff_ + 1) + static_cast<std::size_t>(k[i] + cutoff_);
  }
  return idx;
}

double FourierBasis::wave_norm2(std::size_t mode) const {
  double s = 0.0;
  for (int a = 0; a < dim(); ++a) s += wave(mode, a) * wave(mode, a);
  return s;
}

TorusForm::TorusForm(std::shared_ptr<const FourierBasis> basis, int degree)
    : basis_(std::move(basis)), degree_(degree) {
  if (!basis_) throw InvalidInput("torus form without Fourier basis");
  if (degree < 0 || degree > basis_->dim()) {
    throw InvalidInput("torus form degree " + std::to_string(degree) + " outside 0.." +
                       std::to_string(basis_->dim()));
  }
  coeffs_.assign(num_components() * num_modes(), cplx{});
}

TorusForm::TorusForm(const Lattice& lattice, int cutoff, int degree)
    : TorusForm(std::make_shared<const FourierBasis>(lattice, cutoff), degree) {}

cplx TorusForm::coeff(std::span<const int> k, Mask index) const {
  const int pos = mask_position(dim(), index);
  if (pos < 0 || degree_of(index) != degree_) return {};
  const std::size_t m = basis_->mode_index(k);
  if (m == FourierBasis::npos) return {};
  return at(static_cast<std::size_t>(pos), m);
}

void TorusForm::set(std::span<const int> k, Mask index, cplx value) {
  const int pos = mask_position(dim(), index);
  if (pos < 0 || degree_of(index) != degree_) throw InvalidInput("multi-index does not match form degree");
  const std::size_t m = basis_->mode_index(k);
  if (m == FourierBasis::npos) throw InvalidInput("frequency outside the cutoff");
  at(static_cast<std::size_t>(pos), m) = value;
}

std::vector<cplx> TorusForm::evaluate(const Eigen::VectorXd& x) const {
  const std::size_t nm = num_modes();
  std::vector<cplx> phase(nm);
  for (std::size_t m = 0; m < nm; ++m) {
    double arg = 0.0;
    for (int a = 0; a < dim(); ++a) arg += basis_->wave(m, a) * x(a);
    phase[m] = cplx(std::cos(arg), std::sin(arg));
  }
  std::vector<cplx> out(num_components());
  for (std::size_t c = 0; c < num_components(); ++c) {
    cplx s{};
    for (std::size_t m = 0; m < nm; ++m) s += at(c, m) * phase[m];
    out[c] = s;
  }
  return out;
}

bool TorusForm::same_space(const TorusForm& o) const {
  return degree_ == o.degree_ &&
         (basis_ == o.basis_ ||
          (basis_->cutoff() == o.basis_->cutoff() && basis_->lattice() == o.basis_->lattice()));
}

TorusForm& TorusForm::operator+=(const TorusForm& o) {
  if (!same_space(o)) throw InvalidInput("adding torus forms from different spaces");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

TorusForm& TorusForm::operator-=(const TorusForm& o) {
  if (!same_space(o)) throw InvalidInput("subtracting torus forms from different spaces");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

TorusForm& TorusForm::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

void TorusForm::axpy(cplx s, const TorusForm& o) {
  if (!same_space(o)) throw InvalidInput("axpy on torus forms from different spaces");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
}

double TorusForm::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double TorusForm::l2_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::norm(c);
  return std::sqrt(lattice().covolume() * s);
}

void TorusForm::remove_harmonic() {
  for (std::size_t c = 0; c < num_components(); ++c) at(c, basis_->zero_mode()) = 0.0;
}

double TorusForm::harmonic_norm() const {
  double s = 0.0;
  for (std::size_t c = 0; c < num_components(); ++c) s += std::norm(at(c, basis_->zero_mode()));
  return std::sqrt(s);
}

double TorusForm::reality_defect() const {
  double d = 0.0;
  for (std::size_t c = 0; c < num_components(); ++c) {
    for (std::size_t m = 0; m < num_modes(); ++m) {
      d = std::max(d, std::abs(at(c, basis_->conjugate_mode(m)) - std::conj(at(c, m))));
    }
  }
  return d;
}

void TorusForm::make_real() {
  for (std::size_t c = 0; c < num_components(); ++c) {
    for (std::size_t m = 0; m <= basis_->zero_mode(); ++m) {
      const std::size_t mc = basis_->conjugate_mode(m);
      const cplx avg = 0.5 * (at(c, m) + std::conj(at(c, mc)));
      at(c, m) = avg;
      at(c, mc) = std::conj(avg);
    }
  }
}

TorusForm TorusForm::with_cutoff(int cutoff) const {
  if (cutoff == this->cutoff()) return *this;
  TorusForm out(std::make_shared<const FourierBasis>(lattice(), cutoff), degree_);
  for (std::size_t m = 0; m < out.num_modes(); ++m) {
    const auto k = out.basis_->mode(m);
    const std::size_t src = basis_->mode_index(k);
    if (src == FourierBasis::npos) continue;
    for (std::size_t c = 0; c < num_components(); ++c) out.at(c, m) = at(c, src);
  }
  return out;
}

bool TorusForm::operator==(const TorusForm& o) const {
  return same_space(o) && coeffs_ == o.coeffs_;
}

TorusForm operator+(TorusForm a, const TorusForm& b) { return a += b; }
TorusForm operator-(TorusForm a, const TorusForm& b) { return a -= b; }
TorusForm operator*(cplx s, TorusForm a) { return a *= s; }

cplx l2_inner(const TorusForm& a, const TorusForm& b) {
  if (!a.same_space(b)) throw InvalidInput("inner product of forms from different spaces");
  cplx s{};
  for (std::size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * std::conj(b.data()[i]);
  return a.lattice().covolume() * s;
}

TorusForm exterior_derivative(const TorusForm& form) {
  const int n = form.dim();
  const int p = form.degree();
  if (p >= n) throw InvalidInput("exterior derivative of a top-degree torus form");
  TorusForm out(form.basis(), p + 1);
  const auto& src = form.components();
  const auto& basis = *form.basis();
  for (std::size_t c = 0; c < src.size(); ++c) {
    for (int a = 0; a < n; ++a) {
      const Mask ea = Mask{1} << a;
      const int sign = wedge_sign(ea, src[c]);
      if (sign == 0) continue;
      const auto tgt = static_cast<std::size_t>(mask_position(n, src[c] | ea));
      for (std::size_t m = 0; m < form.num_modes(); ++m) {
        out.at(tgt, m) += static_cast<double>(sign) * cplx(0.0, basis.wave(m, a)) * form.at(c, m);
      }
    }
  }
  return out;
}

TorusForm hodge_star(const TorusForm& form) {
  const int n = form.dim();
  const Mask full = (Mask{1} << n) - 1;
  TorusForm out(form.basis(), n - form.degree());
  const auto& src = form.components();
  for (std::size_t c = 0; c < src.size(); ++c) {
    const Mask comp = full & ~src[c];
    const int sign = wedge_sign(src[c], comp);
    const auto tgt = static_cast<std::size_t>(mask_position(n, comp));
    for (std::size_t m = 0; m < form.num_modes(); ++m) {
      out.at(tgt, m) = static_cast<double>(sign) * form.at(c, m);
    }
  }
  return out;
}

TorusForm star_d_star(const TorusForm& form) {
  if (form.degree() < 1) throw InvalidInput("codifferential of a function");
  return hodge_star(exterior_derivative(hodge_star(form)));
}

TorusForm codifferential(const TorusForm& form) {
  const int n = form.dim();
  const int p = form.degree();
  TorusForm out = star_d_star(form);
  if ((n * (p + 1) + 1) % 2 != 0) out *= -1.0;
  return out;
}

std::vector<std::vector<cplx>> to_grid(const TorusForm& form, const SpectralGrid& grid) {
  if (grid.dim() != form.dim() || grid.cutoff() != form.cutoff()) {
    throw InvalidInput("spectral grid does not match the form's Fourier basis");
  }
  std::vector<std::vector<cplx>> out(form.num_components());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = grid.to_grid(form.component(c));
  return out;
}

std::vector<std::vector<std::vector<cplx>>> gradient_to_grid(const TorusForm& form,
                                                             const SpectralGrid& grid) {
  if (grid.dim() != form.dim() || grid.cutoff() != form.cutoff()) {
    throw InvalidInput("spectral grid does not match the form's Fourier basis");
  }
  const int n = form.dim();
  const auto& basis = *form.basis();
  std::vector<std::vector<std::vector<cplx>>> out(form.num_components());
  std::vector<cplx> tmp(form.num_modes());
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c].resize(n);
    for (int a = 0; a < n; ++a) {
      for (std::size_t m = 0; m < form.num_modes(); ++m) {
        tmp[m] = cplx(0.0, basis.wave(m, a)) * form.at(c, m);
      }
      out[c][a] = grid.to_grid(tmp);
    }
  }
  return out;
}

TorusForm from_grid(std::shared_ptr<const FourierBasis> basis, int degree,
                    const std::vector<std::vector<cplx>>& values, const SpectralGrid& grid) {
  TorusForm out(std::move(basis), degree);
  if (grid.dim() != out.dim() || grid.cutoff() != out.cutoff()) {
    throw InvalidInput("spectral grid does not match the form's Fourier basis");
  }
  if (values.size() != out.num_components()) throw InvalidInput("wrong number of grid components");
  for (std::size_t c = 0; c < values.size(); ++c) {
    const auto coeffs = grid.from_grid(values[c]);
    std::copy(coeffs.begin(), coeffs.end(), out.component(c).begin());
  }
  return out;
}

TorusForm wedge(const TorusForm& a, const TorusForm& b, const SpectralGrid& grid) {
  if (!(a.basis() == b.basis() || (a.cutoff() == b.cutoff() && a.lattice() == b.lattice()))) {
    throw InvalidInput("wedge of torus forms from different spaces");
  }
  const int n = a.dim();
  const int deg = a.degree() + b.degree();
  if (deg > n) throw InvalidInput("wedge degree exceeds the torus dimension");
  const auto ga = to_grid(a, grid);
  const auto gb = to_grid(b, grid);
  const auto& out_masks = masks_of_degree(n, deg);
  std::vector<std::vector<cplx>> vals(out_masks.size(), std::vector<cplx>(grid.num_points()));
  const auto& ma = a.components();
  const auto& mb = b.components();
  for (std::size_t i = 0; i < ma.size(); ++i) {
    for (std::size_t j = 0; j < mb.size(); ++j) {
      const int sign = wedge_sign(ma[i], mb[j]);
      if (sign == 0) continue;
      auto& dst = vals[static_cast<std::size_t>(mask_position(n, ma[i] | mb[j]))];
      for (std::size_t g = 0; g < grid.num_points(); ++g) {
        dst[g] += static_cast<double>(sign) * ga[i][g] * gb[j][g];
      }
    }
  }
  return from_grid(a.basis(), deg, vals, grid);
}

}  // namespace slagfib
