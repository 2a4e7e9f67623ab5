#pragma once

#include <nlohmann/json.hpp>

#include "slagfib/ambient_form.hpp"
#include "slagfib/lattice.hpp"
#include "slagfib/torus_form.hpp"

namespace slagfib {

// Record layout: {degree, n, lattice, [domain_radius,] coeffs: [[k, m, I, re, im], ...]}.
// Multi-indices I are 1-based; for ambient forms dy_j is written as n + j.
// Doubles are written in shortest round-trip form, so read(write(f)) == f.

nlohmann::json lattice_to_json(const Lattice& lattice);
Lattice lattice_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TorusForm& form);
TorusForm torus_form_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AmbientForm& form);
AmbientForm ambient_form_from_json(const nlohmann::json& j);

}  // namespace slagfib
