#include "teq/io.hpp"

#include "teq/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace teq {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T byteswap_if_needed(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

template <class T>
void put(std::ostream& os, T v) {
  v = byteswap_if_needed(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw std::runtime_error("truncated tensor dump");
  return byteswap_if_needed(v);
}

}  // namespace

void write_tensor(std::ostream& os, const Tensor& X) {
  put<std::uint64_t>(os, static_cast<std::uint64_t>(X.order()));
  for (Index n : X.dims()) put<std::uint64_t>(os, static_cast<std::uint64_t>(n));
  for (Index i = 0; i < X.size(); ++i) put<double>(os, X.data()[i]);
  if (!os) throw std::runtime_error("failed to write tensor dump");
}

Tensor read_tensor(std::istream& is) {
  const auto d = get<std::uint64_t>(is);
  if (d == 0 || d > 64) throw std::runtime_error("tensor dump has invalid order " + std::to_string(d));
  Dims dims(d);
  for (auto& n : dims) n = static_cast<Index>(get<std::uint64_t>(is));
  Tensor X(dims);
  for (Index i = 0; i < X.size(); ++i) X.data()[i] = get<double>(is);
  return X;
}

void save_tensor(const std::string& path, const Tensor& X) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_tensor(os, X);
}

Tensor load_tensor(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_tensor(is);
}

Matrix load_square_matrix(const std::string& path) {
  const Tensor X = load_tensor(path);
  if (X.order() != 2 || X.dim(0) != X.dim(1))
    throw DimensionError(path + " does not hold a square matrix");
  return X.to_matrix();
}

void write_banded(std::ostream& os, const BandedMatrix& A) {
  os << A.size() << ' ' << A.bandwidth() << '\n';
  os.precision(17);
  for (Index i = 0; i < A.size(); ++i) {
    for (Index j = std::max<Index>(0, i - A.bandwidth()); j <= i; ++j) {
      if (j > std::max<Index>(0, i - A.bandwidth())) os << ' ';
      os << A(i, j);
    }
    os << '\n';
  }
}

BandedMatrix read_banded(std::istream& is) {
  Index n = 0, bw = -1;
  if (!(is >> n >> bw) || n < 1 || bw < 0) throw std::runtime_error("band file: bad header");
  BandedMatrix A(n, bw);
  for (Index i = 0; i < n; ++i)
    for (Index j = std::max<Index>(0, i - bw); j <= i; ++j) {
      double v;
      if (!(is >> v)) throw std::runtime_error("band file: truncated at row " + std::to_string(i));
      A.set(i, j, v);
    }
  return A;
}

BandedMatrix load_banded(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_banded(is);
}

}  // namespace teq
