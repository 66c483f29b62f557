#include "tnrsvd/dense_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tnrsvd {

Index num_elements(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

namespace {

void check_dims(const Dims& dims) {
  for (Index d : dims) {
    if (d == 0) throw std::invalid_argument("tensor extents must be >= 1");
  }
}

// Strides for first-index-fastest layout.
Dims strides_of(std::span<const Index> dims) {
  Dims s(dims.size());
  Index acc = 1;
  for (Index k = 0; k < dims.size(); ++k) {
    s[k] = acc;
    acc *= dims[k];
  }
  return s;
}

}  // namespace

DenseTensor::DenseTensor() : data_(1, 0.0) {}

DenseTensor::DenseTensor(Dims dims) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_.assign(num_elements(dims_), 0.0);
}

DenseTensor::DenseTensor(Dims dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
  check_dims(dims_);
  if (data_.size() != num_elements(dims_)) {
    throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                " does not match product of dims " +
                                std::to_string(num_elements(dims_)));
  }
}

DenseTensor DenseTensor::scalar(double value) { return DenseTensor({}, {value}); }

DenseTensor DenseTensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const Index m = rows.size();
  const Index n = m == 0 ? 0 : rows.begin()->size();
  DenseTensor t({m, n});
  Index i = 0;
  for (const auto& row : rows) {
    if (row.size() != n) throw std::invalid_argument("ragged matrix literal");
    Index j = 0;
    for (double v : row) t.data_[i + m * j++] = v;
    ++i;
  }
  return t;
}

DenseTensor DenseTensor::identity(Index n) {
  DenseTensor t({n, n});
  for (Index i = 0; i < n; ++i) t.data_[i + n * i] = 1.0;
  return t;
}

Index DenseTensor::dim(Index mode) const {
  if (mode < 1 || mode > dims_.size()) throw std::out_of_range("mode out of range");
  return dims_[mode - 1];
}

double DenseTensor::at(std::span<const Index> indices) const {
  return data_[multi_index(indices, dims_) - 1];
}
double& DenseTensor::at(std::span<const Index> indices) {
  return data_[multi_index(indices, dims_) - 1];
}
double DenseTensor::at(std::initializer_list<Index> indices) const {
  return at(std::span<const Index>(indices.begin(), indices.size()));
}
double& DenseTensor::at(std::initializer_list<Index> indices) {
  return at(std::span<const Index>(indices.begin(), indices.size()));
}

double DenseTensor::operator()(Index i, Index j) const { return at({i, j}); }
double& DenseTensor::operator()(Index i, Index j) { return at({i, j}); }

double DenseTensor::frobenius_norm() const {
  // Scaled accumulation avoids overflow/underflow on extreme inputs.
  double scale = 0.0, ssq = 1.0;
  for (double v : data_) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

Index multi_index(std::span<const Index> indices, std::span<const Index> dims) {
  if (indices.size() != dims.size()) {
    throw std::invalid_argument("index count " + std::to_string(indices.size()) +
                                " does not match tensor order " + std::to_string(dims.size()));
  }
  Index linear = 0;
  Index stride = 1;
  for (Index k = 0; k < dims.size(); ++k) {
    if (indices[k] < 1 || indices[k] > dims[k]) {
      throw std::out_of_range("index " + std::to_string(indices[k]) + " out of range for mode " +
                              std::to_string(k + 1) + " of extent " + std::to_string(dims[k]));
    }
    linear += (indices[k] - 1) * stride;
    stride *= dims[k];
  }
  return linear + 1;
}

std::vector<Index> split_index(Index linear, std::span<const Index> dims) {
  const Index total = num_elements(dims);
  if (linear < 1 || linear > total) throw std::out_of_range("linear index out of range");
  std::vector<Index> idx(dims.size());
  Index rest = linear - 1;
  for (Index k = 0; k < dims.size(); ++k) {
    idx[k] = rest % dims[k] + 1;
    rest /= dims[k];
  }
  return idx;
}

DenseTensor reshape(const DenseTensor& t, Dims new_dims) {
  DenseTensor copy = t;
  return reshape(std::move(copy), std::move(new_dims));
}

DenseTensor reshape(DenseTensor&& t, Dims new_dims) {
  check_dims(new_dims);
  if (num_elements(new_dims) != t.size()) {
    throw std::invalid_argument("reshape changes element count from " + std::to_string(t.size()) +
                                " to " + std::to_string(num_elements(new_dims)));
  }
  return DenseTensor(std::move(new_dims), std::move(t.storage()));
}

DenseTensor permute(const DenseTensor& t, std::span<const Index> order) {
  const Index d = t.order();
  if (order.size() != d) throw std::invalid_argument("permutation length mismatch");
  std::vector<bool> seen(d, false);
  for (Index o : order) {
    if (o < 1 || o > d || seen[o - 1]) throw std::invalid_argument("invalid mode permutation");
    seen[o - 1] = true;
  }
  Dims out_dims(d);
  for (Index k = 0; k < d; ++k) out_dims[k] = t.dims()[order[k] - 1];
  DenseTensor out(out_dims);
  if (d == 0) {
    out.data()[0] = t.data()[0];
    return out;
  }
  const Dims in_strides = strides_of(t.dims());
  // Stride in the input for each output mode.
  Dims src_stride(d);
  for (Index k = 0; k < d; ++k) src_stride[k] = in_strides[order[k] - 1];

  std::vector<Index> counter(d, 0);
  const auto src = t.data();
  auto dst = out.data();
  Index offset = 0;
  const Index n0 = out_dims[0];
  const Index s0 = src_stride[0];
  for (Index pos = 0; pos < out.size(); pos += n0) {
    for (Index i = 0; i < n0; ++i) dst[pos + i] = src[offset + i * s0];
    // Advance the multi-counter over modes 2..d.
    for (Index k = 1; k < d; ++k) {
      if (++counter[k] < out_dims[k]) {
        offset += src_stride[k];
        break;
      }
      offset -= (out_dims[k] - 1) * src_stride[k];
      counter[k] = 0;
    }
  }
  return out;
}

DenseTensor matricize(const DenseTensor& t, Index mode) {
  const Index d = t.order();
  if (mode < 1 || mode > d) throw std::out_of_range("matricize: mode out of range");
  Dims order;
  order.push_back(mode);
  for (Index k = 1; k <= d; ++k) {
    if (k != mode) order.push_back(k);
  }
  DenseTensor p = permute(t, order);
  const Index rows = t.dims()[mode - 1];
  return reshape(std::move(p), {rows, t.size() / rows});
}

DenseTensor kron(const DenseTensor& a, const DenseTensor& b) {
  const Index d = std::max(a.order(), b.order());
  Dims da = a.dims(), db = b.dims();
  da.resize(d, 1);
  db.resize(d, 1);
  Dims dc(d);
  for (Index k = 0; k < d; ++k) dc[k] = da[k] * db[k];
  DenseTensor c(dc);
  if (d == 0) {
    c.data()[0] = a.data()[0] * b.data()[0];
    return c;
  }
  const Dims sc = strides_of(dc);
  const auto av = a.data();
  const auto bv = b.data();
  auto cv = c.data();
  // Walk A; for each entry scatter a scaled copy of B.
  std::vector<Index> ia(d, 0);
  for (Index pa = 0; pa < a.size(); ++pa) {
    Index base = 0;
    for (Index k = 0; k < d; ++k) base += ia[k] * db[k] * sc[k];
    const double alpha = av[pa];
    std::vector<Index> ib(d, 0);
    Index off = 0;
    for (Index pb = 0; pb < b.size(); ++pb) {
      cv[base + off] = alpha * bv[pb];
      for (Index k = 0; k < d; ++k) {
        if (++ib[k] < db[k]) {
          off += sc[k];
          break;
        }
        off -= (db[k] - 1) * sc[k];
        ib[k] = 0;
      }
    }
    for (Index k = 0; k < d; ++k) {
      if (++ia[k] < da[k]) break;
      ia[k] = 0;
    }
  }
  return c;
}

DenseTensor outer(const DenseTensor& a, const DenseTensor& b) {
  Dims dd = a.dims();
  dd.insert(dd.end(), b.dims().begin(), b.dims().end());
  DenseTensor d(dd);
  const auto av = a.data();
  const auto bv = b.data();
  auto dv = d.data();
  const Index na = a.size();
  for (Index j = 0; j < b.size(); ++j) {
    for (Index i = 0; i < na; ++i) dv[i + na * j] = av[i] * bv[j];
  }
  return d;
}

DenseTensor mode_product(const DenseTensor& t, const DenseTensor& m, Index mode) {
  const Index d = t.order();
  if (mode < 1 || mode > d) throw std::out_of_range("mode_product: mode out of range");
  const Index extent = t.dims()[mode - 1];
  Index out_extent = 0;
  if (m.order() == 2) {
    if (m.dims()[1] != extent) {
      throw std::invalid_argument("mode_product: matrix has " + std::to_string(m.dims()[1]) +
                                  " columns, mode extent is " + std::to_string(extent));
    }
    out_extent = m.dims()[0];
  } else if (m.order() == 1) {
    if (m.dims()[0] != extent) throw std::invalid_argument("mode_product: vector length mismatch");
    out_extent = 1;
  } else {
    throw std::invalid_argument("mode_product: operand must be a matrix or a vector");
  }

  // View t as (left, extent, right) and contract the middle index.
  Index left = 1, right = 1;
  for (Index k = 0; k < mode - 1; ++k) left *= t.dims()[k];
  for (Index k = mode; k < d; ++k) right *= t.dims()[k];

  Dims out_dims = t.dims();
  if (m.order() == 2) {
    out_dims[mode - 1] = out_extent;
  } else {
    out_dims.erase(out_dims.begin() + static_cast<std::ptrdiff_t>(mode - 1));
  }
  DenseTensor out(out_dims);
  const auto tv = t.data();
  const auto mv = m.data();
  auto ov = out.data();
  for (Index r = 0; r < right; ++r) {
    for (Index i = 0; i < extent; ++i) {
      for (Index p = 0; p < out_extent; ++p) {
        const double w = m.order() == 2 ? mv[p + out_extent * i] : mv[i];
        if (w == 0.0) continue;
        const double* src = &tv[left * (i + extent * r)];
        double* dst = &ov[left * (p + out_extent * r)];
        for (Index l = 0; l < left; ++l) dst[l] += w * src[l];
      }
    }
  }
  return out;
}

DenseTensor transpose(const DenseTensor& m) {
  if (m.order() != 2) throw std::invalid_argument("transpose expects a 2-way tensor");
  const Index order[] = {2, 1};
  return permute(m, order);
}

}  // namespace tnrsvd
