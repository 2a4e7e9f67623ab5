#include "slagfib/form_io.hpp"

#include "slagfib/errors.hpp"

namespace slagfib {

using nlohmann::json;

namespace {

json index_tuple(Mask mask) {
  json out = json::array();
  for (int i : indices_of(mask)) out.push_back(i + 1);
  return out;
}

Mask mask_from_tuple(const json& j, int limit) {
  std::vector<int> idx;
  for (const auto& v : j) {
    const int i = v.get<int>() - 1;
    if (i < 0 || i >= limit) throw InvalidInput("multi-index entry out of range");
    if (!idx.empty() && i <= idx.back()) throw InvalidInput("multi-index must be strictly increasing");
    idx.push_back(i);
  }
  return mask_of(idx);
}

void require(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("form record lacks field '") + key + "'");
}

}  // namespace

json lattice_to_json(const Lattice& lattice) {
  json gens = json::array();
  const auto& b = lattice.basis();
  for (int c = 0; c < b.cols(); ++c) {
    json v = json::array();
    for (int r = 0; r < b.rows(); ++r) v.push_back(b(r, c));
    gens.push_back(v);
  }
  return gens;
}

Lattice lattice_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidInput("lattice must be a non-empty list of generators");
  const int n = static_cast<int>(j.size());
  Eigen::MatrixXd b(n, n);
  for (int c = 0; c < n; ++c) {
    if (!j[c].is_array() || static_cast<int>(j[c].size()) != n) {
      throw InvalidInput("lattice generators must be n vectors of length n");
    }
    for (int r = 0; r < n; ++r) b(r, c) = j[c][r].get<double>();
  }
  return Lattice(b);
}

json to_json(const TorusForm& form) {
  json coeffs = json::array();
  const auto& comps = form.components();
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (std::size_t m = 0; m < form.num_modes(); ++m) {
      const cplx v = form.at(c, m);
      if (v == cplx{}) continue;
      coeffs.push_back(json::array({form.basis()->mode(m), json::array(), index_tuple(comps[c]),
                                    v.real(), v.imag()}));
    }
  }
  return json{{"kind", "torus"},
              {"degree", form.degree()},
              {"n", form.dim()},
              {"cutoff", form.cutoff()},
              {"lattice", lattice_to_json(form.lattice())},
              {"coeffs", coeffs}};
}

TorusForm torus_form_from_json(const json& j) {
  for (const char* k : {"degree", "n", "cutoff", "lattice", "coeffs"}) require(j, k);
  const Lattice lattice = lattice_from_json(j["lattice"]);
  const int n = j["n"].get<int>();
  if (n != lattice.dim()) throw InvalidInput("form dimension disagrees with its lattice");
  TorusForm form(lattice, j["cutoff"].get<int>(), j["degree"].get<int>());
  for (const auto& row : j["coeffs"]) {
    if (!row.is_array() || row.size() != 5) throw InvalidInput("coefficient rows have five entries");
    const auto k = row[0].get<std::vector<int>>();
    if (static_cast<int>(k.size()) != n) throw InvalidInput("frequency has wrong length");
    const Mask mask = mask_from_tuple(row[2], n);
    if (degree_of(mask) != form.degree()) throw InvalidInput("multi-index degree mismatch");
    if (form.basis()->mode_index(k) == FourierBasis::npos) throw InvalidInput("frequency beyond cutoff");
    form.set(k, mask, cplx(row[3].get<double>(), row[4].get<double>()));
  }
  return form;
}

json to_json(const AmbientForm& form) {
  const int n = form.dim();
  json coeffs = json::array();
  for (const auto& [key, v] : form.terms()) {
    coeffs.push_back(json::array({std::vector<int>(key.k.begin(), key.k.begin() + n),
                                  std::vector<int>(key.m.begin(), key.m.begin() + n),
                                  index_tuple(key.mask), v.real(), v.imag()}));
  }
  return json{{"kind", "ambient"},
              {"degree", form.degree()},
              {"n", n},
              {"domain_radius", form.domain_radius()},
              {"lattice", lattice_to_json(form.lattice())},
              {"coeffs", coeffs}};
}

AmbientForm ambient_form_from_json(const json& j) {
  for (const char* k : {"degree", "n", "domain_radius", "lattice", "coeffs"}) require(j, k);
  const Lattice lattice = lattice_from_json(j["lattice"]);
  const int n = j["n"].get<int>();
  if (n != lattice.dim()) throw InvalidInput("form dimension disagrees with its lattice");
  AmbientForm form(lattice, j["degree"].get<int>(), j["domain_radius"].get<double>());
  for (const auto& row : j["coeffs"]) {
    if (!row.is_array() || row.size() != 5) throw InvalidInput("coefficient rows have five entries");
    const auto k = row[0].get<std::vector<int>>();
    const auto m = row[1].get<std::vector<int>>();
    if (static_cast<int>(k.size()) != n || static_cast<int>(m.size()) != n) {
      throw InvalidInput("frequency or monomial has wrong length");
    }
    TermKey key;
    std::copy(k.begin(), k.end(), key.k.begin());
    std::copy(m.begin(), m.end(), key.m.begin());
    key.mask = mask_from_tuple(row[2], 2 * n);
    form.add(key, cplx(row[3].get<double>(), row[4].get<double>()));
  }
  return form;
}

}  // namespace slagfib
