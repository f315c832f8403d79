#pragma once

#include <string>

#include "nlc/fields.hpp"

namespace nlc {

/// Binary field snapshot format.
///
/// 32-byte header: magic "NLCF", version u32, nx u32, ny u32,
/// component-count u32, pad u32, time f64 — all little-endian — followed by
/// row-major f64 arrays per component. Component count fixes the layout:
/// 2 = MAC velocity ((nx+1) x ny, then nx x (ny+1)),
/// 3 = nodal director (three (nx+1) x (ny+1) arrays).
inline constexpr uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::string& path, const VectorField2& v, double time);
void write_snapshot(const std::string& path, const DirectorField3& d, double time);

struct SnapshotInfo {
    uint32_t version = 0;
    int nx = 0, ny = 0;
    int ncomp = 0;
    double time = 0.0;
};

SnapshotInfo read_snapshot_info(const std::string& path);
VectorField2 read_snapshot_velocity(const std::string& path, double* time = nullptr);
DirectorField3 read_snapshot_director(const std::string& path, double* time = nullptr);

}  // namespace nlc
