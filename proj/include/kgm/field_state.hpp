#pragma once
// Full lattice phase-space snapshot (phi, psi, A, E) with time, coupling,
// and a binary save/load format.
//
// Snapshot layout, all little-endian: magic "KGM1", u32 n, f64 L, f64 t,
// f64 e, u32 field_count (= 10), then field_count scalar lattices of f64 in
// row-major order: Re phi, Im phi, Re psi, Im psi, A1..A3, E1..E3.  A JSON
// provenance sidecar is written next to the file as <path>.json when a
// metadata string is supplied, and returned verbatim on load when present.

#include "kgm/grid3.hpp"
#include "kgm/potential.hpp"

#include <string>

namespace kgm {

struct FieldState {
    Grid3 grid;
    double t = 0.0;
    double e = 0.0;
    CField phi, psi;
    Vec3Field A, E;

    static FieldState zeros(const Grid3& g, double e);
};

// H = 1/2 int (|E|^2 + |curl A|^2 + |psi|^2 + |grad phi - ie(A + a_ext)phi|^2)
//     + int V(|phi|),  V(f) = m^2 f^2/2 - U(f)
// a_ext, when given, joins the covariant derivative only.
double field_energy(const Fft3& fft, const FieldState& s, const PotentialSpec& pot,
                    const Vec3Field* a_ext = nullptr);

// ||div A||_2 (h^3-weighted), the Coulomb gauge monitor
double divA_norm(const Fft3& fft, const FieldState& s);

void save_state(const FieldState& s, const std::string& path,
                const std::string& meta_json = "");
FieldState load_state(const std::string& path, std::string* meta_json = nullptr);

} // namespace kgm
