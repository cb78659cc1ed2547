#include "helm/core.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace helm {

Grid3::Grid3(const std::array<AxisSpec, 3>& axes, Placement placement) : placement_(placement) {
  for (int a = 0; a < 3; ++a) {
    const auto& ax = axes[a];
    if (ax.n < 1) throw Error("Grid3: axis size must be positive");
    if (!(ax.hi > ax.lo)) throw Error("Grid3: axis bounds must satisfy lo < hi");
    if (placement == Placement::Collocated && ax.n < 2)
      throw Error("Grid3: a collocated axis needs at least two nodes");
    n_[a] = ax.n;
    lo_[a] = ax.lo;
    hi_[a] = ax.hi;
    h_[a] = placement == Placement::Collocated ? (ax.hi - ax.lo) / (ax.n - 1) : (ax.hi - ax.lo) / ax.n;
  }
}

Grid3 Grid3::cube(int n, Placement placement, double lo, double hi) {
  return Grid3({AxisSpec{n, lo, hi}, AxisSpec{n, lo, hi}, AxisSpec{n, lo, hi}}, placement);
}

Grid3 Grid3::box(int nx, int ny, int nz, Placement placement) {
  return Grid3({AxisSpec{nx, 0.0, 1.0}, AxisSpec{ny, 0.0, 1.0}, AxisSpec{nz, 0.0, 1.0}}, placement);
}

bool Grid3::uniform(double rtol) const {
  const double ref = h_[0];
  return std::abs(h_[1] - ref) <= rtol * ref && std::abs(h_[2] - ref) <= rtol * ref;
}

Grid3 Grid3::padded(int layers) const {
  std::array<AxisSpec, 3> axes;
  for (int a = 0; a < 3; ++a)
    axes[a] = AxisSpec{n_[a] + 2 * layers, lo_[a] - layers * h_[a], hi_[a] + layers * h_[a]};
  return Grid3(axes, placement_);
}

bool Grid3::operator==(const Grid3& other) const {
  return n_ == other.n_ && lo_ == other.lo_ && hi_ == other.hi_ && placement_ == other.placement_;
}

std::size_t index(int i, int j, int l, const Grid3& grid) {
  if (i < 1 || i > grid.nx() || j < 1 || j > grid.ny() || l < 1 || l > grid.nz())
    throw std::out_of_range("index: (i, j, l) outside the grid");
  return grid.offset(i - 1, j - 1, l - 1);
}

void require_same_grid(const Grid3& a, const Grid3& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": grid mismatch");
}

Field3& Field3::operator+=(const Field3& other) {
  require_same_grid(grid_, other.grid_, "Field3::operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Field3& Field3::operator-=(const Field3& other) {
  require_same_grid(grid_, other.grid_, "Field3::operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Field3& Field3::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

Field3 operator+(Field3 a, const Field3& b) { return a += b; }
Field3 operator-(Field3 a, const Field3& b) { return a -= b; }
Field3 operator*(cplx s, Field3 a) { return a *= s; }

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double ar = a[k].real(), ai = a[k].imag();
    const double br = b[k].real(), bi = b[k].imag();
    re += ar * br + ai * bi;
    im += ar * bi - ai * br;
  }
  return {re, im};
}

double norm2(std::span<const cplx> a) {
  // Scaled accumulation keeps huge/tiny fields finite.
  double scale = 0.0, ssq = 1.0;
  for (const auto& z : a) {
    for (double v : {z.real(), z.imag()}) {
      if (v == 0.0) continue;
      const double av = std::abs(v);
      if (scale < av) {
        ssq = 1.0 + ssq * (scale / av) * (scale / av);
        scale = av;
      } else {
        ssq += (av / scale) * (av / scale);
      }
    }
  }
  return scale * std::sqrt(ssq);
}

double norm_inf(std::span<const cplx> a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t k = 0; k < x.size(); ++k) y[k] += alpha * x[k];
}

NormReport norms(std::span<const cplx> u, std::span<const cplx> reference) {
  if (u.size() != reference.size()) throw GridMismatch("norms: size mismatch");
  CVector diff(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) diff[k] = u[k] - reference[k];
  const double num2 = norm2(diff);
  const double numi = norm_inf(diff);
  const double den2 = norm2(reference);
  const double deni = norm_inf(reference);
  auto ratio = [](double num, double den) {
    if (den > 0.0) return num / den;
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };
  return {ratio(num2, den2), numi, ratio(numi, deni)};
}

NormReport norms(const Field3& u, const Field3& reference) {
  require_same_grid(u.grid(), reference.grid(), "norms");
  return norms(u.values(), reference.values());
}

namespace {

constexpr char kMagic[8] = {'H', 'L', 'M', 'F', 'I', 'E', 'L', 'D'};

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

template <class T>
void put(std::ofstream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("snapshot: truncated file");
  return to_little(v);
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Field3& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("snapshot: cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  put<std::int64_t>(out, field.grid().nx());
  put<std::int64_t>(out, field.grid().ny());
  put<std::int64_t>(out, field.grid().nz());
  for (const auto& z : field.values()) {
    put(out, z.real());
    put(out, z.imag());
  }
  if (!out) throw Error("snapshot: write failed for " + path.string());
}

SnapshotHeader read_snapshot_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("snapshot: cannot open " + path.string());
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw Error("snapshot: bad magic");
  SnapshotHeader h;
  h.nx = get<std::int64_t>(in);
  h.ny = get<std::int64_t>(in);
  h.nz = get<std::int64_t>(in);
  return h;
}

Field3 read_snapshot(const std::filesystem::path& path, const Grid3& grid) {
  const auto h = read_snapshot_header(path);
  if (h.nx != grid.nx() || h.ny != grid.ny() || h.nz != grid.nz())
    throw GridMismatch("snapshot: dimensions do not match the grid");
  std::ifstream in(path, std::ios::binary);
  in.seekg(32);
  Field3 f(grid);
  for (auto& z : f.values()) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    z = {re, im};
  }
  return f;
}

}  // namespace helm
