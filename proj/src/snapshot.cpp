#include "illg/snapshot.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace illg {

namespace {

void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("snapshot " + path + ": " + what);
}

}  // namespace

void write_snapshot(const Snapshot& s, const std::string& path) {
  if (s.nx < 1 || s.ny < 1 || s.nz < 1) fail(path, "empty grid");
  const std::size_t n = static_cast<std::size_t>(s.nx) * s.ny * s.nz;
  if (s.m.size() != n) fail(path, "cell count does not match header");

  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(path, "cannot open for writing");
  std::fprintf(f, "%d %d %d %.17g %.17g %.17g %.17g\n", s.nx, s.ny, s.nz,
               s.dx, s.dy, s.dz, s.time);
  std::size_t c = 0;
  for (int l = 1; l <= s.nz; ++l) {
    for (int k = 1; k <= s.ny; ++k) {
      for (int j = 1; j <= s.nx; ++j, ++c) {
        const Vec3& m = s.m[c];
        std::fprintf(f, "%d %d %d %.17g %.17g %.17g %.17g %.17g %.17g\n", j, k,
                     l, (j - 0.5) * s.dx, (k - 0.5) * s.dy, (l - 0.5) * s.dz,
                     m.x, m.y, m.z);
      }
    }
  }
  if (std::fclose(f) != 0) fail(path, "write error on close");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open for reading");
  Snapshot s;
  if (!(in >> s.nx >> s.ny >> s.nz >> s.dx >> s.dy >> s.dz >> s.time))
    fail(path, "malformed header");
  if (s.nx < 1 || s.ny < 1 || s.nz < 1) fail(path, "invalid grid extents");
  const std::size_t n = static_cast<std::size_t>(s.nx) * s.ny * s.nz;
  s.m.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    int j, k, l;
    double x, y, z;
    Vec3 m;
    if (!(in >> j >> k >> l >> x >> y >> z >> m.x >> m.y >> m.z))
      fail(path, "truncated at cell " + std::to_string(c));
    std::size_t expect = c;
    std::size_t got = static_cast<std::size_t>(j - 1) +
                      static_cast<std::size_t>(s.nx) *
                          (static_cast<std::size_t>(k - 1) +
                           static_cast<std::size_t>(s.ny) *
                               static_cast<std::size_t>(l - 1));
    if (j < 1 || j > s.nx || k < 1 || k > s.ny || l < 1 || l > s.nz ||
        got != expect)
      fail(path, "cells out of canonical order at line " + std::to_string(c + 2));
    s.m[c] = m;
  }
  return s;
}

}  // namespace illg
