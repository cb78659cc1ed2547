#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <new>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace helm {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

// The preconditioner's discrete operator is singular (some eigenvalue vanishes).
class ResonanceError : public Error {
 public:
  using Error::Error;
};

class DiagonalizabilityError : public Error {
 public:
  using Error::Error;
};

template <class T, std::size_t Align = 64>
struct AlignedAllocator {
  using value_type = T;
  template <class U>
  struct rebind {
    using other = AlignedAllocator<U, Align>;
  };

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U, Align>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Align}));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, std::align_val_t{Align}); }

  template <class U>
  bool operator==(const AlignedAllocator<U, Align>&) const noexcept {
    return true;
  }
};

using CVector = std::vector<cplx, AlignedAllocator<cplx>>;

enum class Placement { Collocated, Staggered };

struct AxisSpec {
  int n = 0;
  double lo = 0.0;
  double hi = 1.0;
};

// Structured rectangular grid. Collocated nodes sit on the boundary
// (h = L/(N-1)); staggered nodes are offset half a cell inward (h = L/N).
class Grid3 {
 public:
  Grid3(const std::array<AxisSpec, 3>& axes, Placement placement);

  static Grid3 cube(int n, Placement placement, double lo = 0.0, double hi = 1.0);
  static Grid3 box(int nx, int ny, int nz, Placement placement);

  int n(int axis) const { return n_[axis]; }
  int nx() const { return n_[0]; }
  int ny() const { return n_[1]; }
  int nz() const { return n_[2]; }
  std::size_t size() const { return std::size_t(n_[0]) * n_[1] * n_[2]; }
  std::size_t slice_size() const { return std::size_t(n_[0]) * n_[1]; }

  double h(int axis) const { return h_[axis]; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  Placement placement() const { return placement_; }

  // Coordinate of 0-based node i along axis; i may lie outside [0, n) for ghost nodes.
  double coord(int axis, int i) const {
    return placement_ == Placement::Collocated ? lo_[axis] + i * h_[axis]
                                               : lo_[axis] + (i + 0.5) * h_[axis];
  }

  bool uniform(double rtol = 1e-12) const;

  std::size_t offset(int i, int j, int l) const {
    return std::size_t(i) + std::size_t(n_[0]) * (std::size_t(j) + std::size_t(n_[1]) * l);
  }

  // Grid padded by `layers` ghost nodes on every face, same spacing and placement.
  Grid3 padded(int layers) const;

  bool operator==(const Grid3& other) const;

 private:
  std::array<int, 3> n_{};
  std::array<double, 3> lo_{}, hi_{}, h_{};
  Placement placement_;
};

// 1-based (i, j, l) to flat offset, x fastest. Throws std::out_of_range.
std::size_t index(int i, int j, int l, const Grid3& grid);

// Complex field on a Grid3, x-fastest and slice-major: slice l is a
// contiguous block of nx*ny entries.
class Field3 {
 public:
  explicit Field3(const Grid3& grid) : grid_(grid), data_(grid.size()) {}
  Field3(const Grid3& grid, cplx value) : grid_(grid), data_(grid.size(), value) {}

  template <class Fn>
  static Field3 sample(const Grid3& grid, Fn&& fn) {
    Field3 out(grid);
    for (int l = 0; l < grid.nz(); ++l)
      for (int j = 0; j < grid.ny(); ++j)
        for (int i = 0; i < grid.nx(); ++i)
          out(i, j, l) = fn(grid.coord(0, i), grid.coord(1, j), grid.coord(2, l));
    return out;
  }

  const Grid3& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }
  std::span<cplx> values() { return {data_.data(), data_.size()}; }
  std::span<const cplx> values() const { return {data_.data(), data_.size()}; }

  std::span<cplx> slice(int l) { return values().subspan(grid_.slice_size() * l, grid_.slice_size()); }
  std::span<const cplx> slice(int l) const {
    return values().subspan(grid_.slice_size() * l, grid_.slice_size());
  }

  cplx& operator[](std::size_t k) { return data_[k]; }
  const cplx& operator[](std::size_t k) const { return data_[k]; }
  cplx& operator()(int i, int j, int l) { return data_[grid_.offset(i, j, l)]; }
  const cplx& operator()(int i, int j, int l) const { return data_[grid_.offset(i, j, l)]; }

  void fill(cplx value) { std::fill(data_.begin(), data_.end(), value); }

  Field3& operator+=(const Field3& other);
  Field3& operator-=(const Field3& other);
  Field3& operator*=(cplx s);

 private:
  Grid3 grid_;
  CVector data_;
};

Field3 operator+(Field3 a, const Field3& b);
Field3 operator-(Field3 a, const Field3& b);
Field3 operator*(cplx s, Field3 a);

void require_same_grid(const Grid3& a, const Grid3& b, const char* what);

// Vector kernels shared by the solvers.
cplx dot(std::span<const cplx> a, std::span<const cplx> b);  // sum conj(a_k) b_k
double norm2(std::span<const cplx> a);
double norm_inf(std::span<const cplx> a);
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);

struct NormReport {
  double l2_rel = 0.0;
  double linf_abs = 0.0;
  double linf_rel = 0.0;
};

// Error of u against reference: ||u-ref||_2/||ref||_2, ||u-ref||_inf, ||u-ref||_inf/||ref||_inf.
// A zero reference with a nonzero difference yields infinite relative entries.
NormReport norms(const Field3& u, const Field3& reference);
NormReport norms(std::span<const cplx> u, std::span<const cplx> reference);

// Binary snapshot: 32-byte header ("HLMFIELD", int64 nx, ny, nz, little
// endian) followed by interleaved little-endian (re, im) doubles.
struct SnapshotHeader {
  std::int64_t nx = 0, ny = 0, nz = 0;
};

void write_snapshot(const std::filesystem::path& path, const Field3& field);
SnapshotHeader read_snapshot_header(const std::filesystem::path& path);
Field3 read_snapshot(const std::filesystem::path& path, const Grid3& grid);

}  // namespace helm
