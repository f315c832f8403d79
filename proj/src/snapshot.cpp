#include "nlc/snapshot.hpp"

#include <cstring>
#include <fstream>

namespace nlc {

namespace {

struct Header {
    char magic[4];
    uint32_t version;
    uint32_t nx, ny, ncomp;
    uint32_t pad;
    double time;
};
static_assert(sizeof(Header) == 32);

void write_header(std::ofstream& f, int nx, int ny, int ncomp, double time) {
    Header h{};
    std::memcpy(h.magic, "NLCF", 4);
    h.version = kSnapshotVersion;
    h.nx = uint32_t(nx);
    h.ny = uint32_t(ny);
    h.ncomp = uint32_t(ncomp);
    h.pad = 0;
    h.time = time;
    f.write(reinterpret_cast<const char*>(&h), sizeof(h));
}

Header read_header(std::ifstream& f, const std::string& path) {
    Header h{};
    f.read(reinterpret_cast<char*>(&h), sizeof(h));
    if (!f || std::memcmp(h.magic, "NLCF", 4) != 0)
        throw validation_error("bad snapshot file: " + path);
    return h;
}

void write_array(std::ofstream& f, const Array2& a) {
    f.write(reinterpret_cast<const char*>(a.data().data()), std::streamsize(a.size() * 8));
}

void read_array(std::ifstream& f, Array2& a) {
    f.read(reinterpret_cast<char*>(a.data().data()), std::streamsize(a.size() * 8));
}

}  // namespace

void write_snapshot(const std::string& path, const VectorField2& v, double time) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_header(f, v.domain().nx, v.domain().ny, 2, time);
    write_array(f, v.u1());
    write_array(f, v.u2());
}

void write_snapshot(const std::string& path, const DirectorField3& d, double time) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    write_header(f, d.domain().nx, d.domain().ny, 3, time);
    for (int k = 0; k < 3; ++k) write_array(f, d.comp(k));
}

SnapshotInfo read_snapshot_info(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    Header h = read_header(f, path);
    return {h.version, int(h.nx), int(h.ny), int(h.ncomp), h.time};
}

VectorField2 read_snapshot_velocity(const std::string& path, double* time) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    Header h = read_header(f, path);
    if (h.ncomp != 2) throw validation_error("snapshot is not a velocity field: " + path);
    VectorField2 v(Domain(int(h.nx)));
    read_array(f, v.u1());
    read_array(f, v.u2());
    v.check_finite("snapshot read");
    if (time) *time = h.time;
    return v;
}

DirectorField3 read_snapshot_director(const std::string& path, double* time) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    Header h = read_header(f, path);
    if (h.ncomp != 3) throw validation_error("snapshot is not a director field: " + path);
    DirectorField3 d(Domain(int(h.nx)));
    for (int k = 0; k < 3; ++k) read_array(f, d.comp(k));
    d.check_finite("snapshot read");
    if (time) *time = h.time;
    return d;
}

}  // namespace nlc
