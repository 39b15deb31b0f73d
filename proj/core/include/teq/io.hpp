#pragma once

#include "teq/banded.hpp"
#include "teq/tensor.hpp"

#include <iosfwd>
#include <string>

namespace teq {

// Binary dump: uint64 d, d x uint64 dims, then the float64 entries in the
// tensor's linear order, all little-endian.
void write_tensor(std::ostream& os, const Tensor& X);
Tensor read_tensor(std::istream& is);
void save_tensor(const std::string& path, const Tensor& X);
Tensor load_tensor(const std::string& path);

// Square matrix stored as an order-2 tensor dump.
Matrix load_square_matrix(const std::string& path);

// Text band format: first line "n bandwidth", then for every row i the entries
// A(i, max(0, i - bandwidth)) .. A(i, i), whitespace separated.
void write_banded(std::ostream& os, const BandedMatrix& A);
BandedMatrix read_banded(std::istream& is);
BandedMatrix load_banded(const std::string& path);

}  // namespace teq
