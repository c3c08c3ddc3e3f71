#include "kgm/field_state.hpp"
#include "kgm/errors.hpp"
#include "kgm/kernels.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace kgm {

FieldState FieldState::zeros(const Grid3& g, double e) {
    FieldState s;
    s.grid = g;
    s.e = e;
    s.phi.assign(g.size(), Complex(0.0, 0.0));
    s.psi.assign(g.size(), Complex(0.0, 0.0));
    s.A = make_vec3(g);
    s.E = make_vec3(g);
    return s;
}

double field_energy(const Fft3& fft, const FieldState& s, const PotentialSpec& pot,
                    const Vec3Field* a_ext) {
    const Grid3& g = s.grid;
    const double h3 = g.h * g.h * g.h;
    double quad = 0.0;
    for (int a = 0; a < 3; ++a) quad += kernels::l2sq(g, s.E[a]);
    Vec3Field cA = curl(fft, s.A);
    for (int a = 0; a < 3; ++a) quad += kernels::l2sq(g, cA[a]);
    quad += kernels::l2sq(g, s.psi);
    auto gphi = gradient(fft, s.phi);
    for (int a = 0; a < 3; ++a) {
        CField D = gphi[a];
        if (a_ext) {
            RField tot = s.A[a];
            kernels::axpy(tot, 1.0, (*a_ext)[a]);
            kernels::add_i_scaled(D, -s.e, tot, s.phi);
        } else {
            kernels::add_i_scaled(D, -s.e, s.A[a], s.phi);
        }
        quad += kernels::l2sq(g, D);
    }
    return 0.5 * h3 * quad + h3 * kernels::potential_sum(g, pot, s.phi);
}

double divA_norm(const Fft3& fft, const FieldState& s) {
    RField d = divergence(fft, s.A);
    const double h3 = s.grid.h * s.grid.h * s.grid.h;
    return std::sqrt(kernels::l2sq(s.grid, d) * h3);
}

namespace {

constexpr char kMagic[4] = {'K', 'G', 'M', '1'};
constexpr std::uint32_t kFieldCount = 10;

template <class T>
void write_raw(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
void read_raw(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_component(std::ofstream& os, const CField& f, bool real) {
    std::vector<double> buf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) buf[i] = real ? f[i].real() : f[i].imag();
    os.write(reinterpret_cast<const char*>(buf.data()),
             std::streamsize(sizeof(double) * buf.size()));
}

void read_component(std::ifstream& is, CField& f, bool real) {
    std::vector<double> buf(f.size());
    is.read(reinterpret_cast<char*>(buf.data()),
            std::streamsize(sizeof(double) * buf.size()));
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (real)
            f[i] = Complex(buf[i], f[i].imag());
        else
            f[i] = Complex(f[i].real(), buf[i]);
    }
}

} // namespace

void save_state(const FieldState& s, const std::string& path, const std::string& meta_json) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw UsageError("cannot open snapshot for writing: " + path);
    os.write(kMagic, 4);
    write_raw(os, std::uint32_t(s.grid.n));
    write_raw(os, s.grid.L);
    write_raw(os, s.t);
    write_raw(os, s.e);
    write_raw(os, kFieldCount);
    write_component(os, s.phi, true);
    write_component(os, s.phi, false);
    write_component(os, s.psi, true);
    write_component(os, s.psi, false);
    for (int a = 0; a < 3; ++a)
        os.write(reinterpret_cast<const char*>(s.A[a].data()),
                 std::streamsize(sizeof(double) * s.A[a].size()));
    for (int a = 0; a < 3; ++a)
        os.write(reinterpret_cast<const char*>(s.E[a].data()),
                 std::streamsize(sizeof(double) * s.E[a].size()));
    if (!os) throw UsageError("snapshot write failed: " + path);
    if (!meta_json.empty()) {
        std::ofstream ms(path + ".json", std::ios::trunc);
        if (!ms) throw UsageError("cannot open sidecar for writing: " + path + ".json");
        ms << meta_json << "\n";
    }
}

FieldState load_state(const std::string& path, std::string* meta_json) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw UsageError("cannot open snapshot: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw UsageError("not a KGM1 snapshot: " + path);
    std::uint32_t n = 0, count = 0;
    double L = 0.0, t = 0.0, e = 0.0;
    read_raw(is, n);
    read_raw(is, L);
    read_raw(is, t);
    read_raw(is, e);
    read_raw(is, count);
    if (!is || count != kFieldCount)
        throw UsageError("snapshot header is corrupt: " + path);
    FieldState s = FieldState::zeros(Grid3::make(int(n), L), e);
    s.t = t;
    read_component(is, s.phi, true);
    read_component(is, s.phi, false);
    read_component(is, s.psi, true);
    read_component(is, s.psi, false);
    for (int a = 0; a < 3; ++a)
        is.read(reinterpret_cast<char*>(s.A[a].data()),
                std::streamsize(sizeof(double) * s.A[a].size()));
    for (int a = 0; a < 3; ++a)
        is.read(reinterpret_cast<char*>(s.E[a].data()),
                std::streamsize(sizeof(double) * s.E[a].size()));
    if (!is) throw UsageError("snapshot is truncated: " + path);
    if (meta_json) {
        meta_json->clear();
        std::ifstream ms(path + ".json");
        if (ms) {
            std::string line, all;
            while (std::getline(ms, line)) {
                all += line;
                all += "\n";
            }
            *meta_json = all;
        }
    }
    return s;
}

} // namespace kgm
