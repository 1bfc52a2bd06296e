#include "rotor/mps.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

namespace rotor {

namespace {

constexpr long kDenseGuard = 1L << 20;
constexpr char kMagic[8] = {'R', 'M', 'P', 'S', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersionTag = 1;

TruncationSpec exact_spec() {
  TruncationSpec s;
  s.chi_max = std::numeric_limits<long>::max();
  s.cutoff = 0.0;
  return s;
}

// right(chi, n) with row i scaled by s[i]: the S·V^dag carry of an SVD shift.
DenseTensor scale_rows(const DenseTensor& right,
                       const std::vector<double>& s) {
  DenseTensor out = right;
  const long n = right.extent(1);
  for (long i = 0; i < right.extent(0); ++i) {
    for (long j = 0; j < n; ++j) out[i * n + j] *= s[i];
  }
  return out;
}

// left(m, chi) with column j scaled by s[j]: the U·S carry.
DenseTensor scale_cols(const DenseTensor& left, const std::vector<double>& s) {
  DenseTensor out = left;
  const long chi = left.extent(1);
  for (long i = 0; i < left.extent(0); ++i) {
    for (long j = 0; j < chi; ++j) out[i * chi + j] *= s[j];
  }
  return out;
}

// One exact shift of the center to the right (c -> c+1).
void shift_right(Mps& psi, int c) {
  const long l = psi.a[c].extent(0), d = psi.a[c].extent(1),
             r = psi.a[c].extent(2);
  TruncatedSvd svd =
      truncated_svd(psi.a[c].reshaped({l * d, r}), exact_spec());
  const long chi = static_cast<long>(svd.singular_values.size());
  psi.a[c] = std::move(svd.left).reshaped({l, d, chi});
  const DenseTensor carry = scale_rows(svd.right, svd.singular_values);
  psi.a[c + 1] = contract(carry, psi.a[c + 1], {{1, 0}});
}

// One exact shift of the center to the left (c -> c-1).
void shift_left(Mps& psi, int c) {
  const long l = psi.a[c].extent(0), d = psi.a[c].extent(1),
             r = psi.a[c].extent(2);
  TruncatedSvd svd =
      truncated_svd(psi.a[c].reshaped({l, d * r}), exact_spec());
  const long chi = static_cast<long>(svd.singular_values.size());
  psi.a[c] = std::move(svd.right).reshaped({chi, d, r});
  const DenseTensor carry = scale_cols(svd.left, svd.singular_values);
  psi.a[c - 1] = contract(psi.a[c - 1], carry, {{2, 0}});
}

}  // namespace

void Mps::validate() const {
  if (L < 1 || static_cast<int>(a.size()) != L) {
    throw std::invalid_argument("Mps: tensor count does not match L");
  }
  if (center < 0 || center >= L) {
    throw std::invalid_argument("Mps: center out of range");
  }
  if (static_cast<int>(discarded.size()) != (L > 0 ? L - 1 : 0)) {
    throw std::invalid_argument("Mps: discarded-weight bookkeeping size");
  }
  const long d = site_dim();
  if (a.front().extent(0) != 1 || a.back().extent(2) != 1) {
    throw std::invalid_argument("Mps: boundary bonds must have extent 1");
  }
  for (int k = 0; k < L; ++k) {
    if (a[k].rank() != 3 || a[k].extent(1) != d) {
      throw std::invalid_argument("Mps: bad site tensor at " +
                                  std::to_string(k));
    }
    if (k + 1 < L && a[k].extent(2) != a[k + 1].extent(0)) {
      throw std::invalid_argument("Mps: bond mismatch at " + std::to_string(k));
    }
    for (long i = 0; i < a[k].size(); ++i) {
      if (!std::isfinite(a[k][i].real()) || !std::isfinite(a[k][i].imag())) {
        throw std::invalid_argument("Mps: non-finite entry at site " +
                                    std::to_string(k));
      }
    }
  }
}

double Mps::isometry_residual() const {
  double worst = 0.0;
  for (int k = 0; k < L; ++k) {
    if (k == center) continue;
    DenseTensor g = (k < center)
                        ? contract(a[k].conjugate(), a[k], {{0, 0}, {1, 1}})
                        : contract(a[k].conjugate(), a[k], {{1, 1}, {2, 2}});
    const long n = g.extent(0);
    for (long i = 0; i < n; ++i) g[i * n + i] -= 1.0;
    for (long i = 0; i < g.size(); ++i) {
      worst = std::max(worst, std::abs(g[i]));
    }
  }
  return worst;
}

double Mps::norm() const { return a.at(center).norm(); }

Mps product_mps(int L, int n_max, const Eigen::VectorXcd& local) {
  if (L < 1 || n_max < 1) {
    throw std::invalid_argument("product_mps: need L >= 1 and n_max >= 1");
  }
  const long d = 2 * n_max + 1;
  if (local.size() != d) {
    throw std::invalid_argument("product_mps: local state dimension mismatch");
  }
  const double n = local.norm();
  if (n == 0.0) throw std::invalid_argument("product_mps: zero local state");

  Mps psi;
  psi.L = L;
  psi.n_max = n_max;
  psi.center = 0;
  psi.discarded.assign(L > 0 ? L - 1 : 0, 0.0);
  for (int k = 0; k < L; ++k) {
    DenseTensor t({1, d, 1});
    for (long p = 0; p < d; ++p) t[p] = local[p] / n;
    psi.a.push_back(std::move(t));
  }
  psi.validate();
  return psi;
}

Mps random_mps(int L, int n_max, long chi, std::uint64_t seed) {
  if (L < 1 || n_max < 1 || chi < 1) {
    throw std::invalid_argument("random_mps: bad arguments");
  }
  const long d = 2 * n_max + 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Bond dimensions capped by chi and by what the chain ends can carry.
  std::vector<long> bond(L + 1, 1);
  for (int k = 1; k < L; ++k) {
    double from_left = std::pow(static_cast<double>(d), k);
    double from_right = std::pow(static_cast<double>(d), L - k);
    bond[k] = static_cast<long>(
        std::min<double>(chi, std::min(from_left, from_right)));
  }

  Mps psi;
  psi.L = L;
  psi.n_max = n_max;
  psi.discarded.assign(L - 1, 0.0);
  for (int k = 0; k < L; ++k) {
    DenseTensor t({bond[k], d, bond[k + 1]});
    for (long i = 0; i < t.size(); ++i) t[i] = cplx(gauss(rng), gauss(rng));
    psi.a.push_back(std::move(t));
  }
  psi.center = 0;
  recanonicalize(psi, 0);
  normalize(psi);
  psi.validate();
  return psi;
}

void move_center(Mps& psi, int target) {
  if (target < 0 || target >= psi.L) {
    throw std::invalid_argument("move_center: target out of range");
  }
  while (psi.center < target) {
    shift_right(psi, psi.center);
    ++psi.center;
  }
  while (psi.center > target) {
    shift_left(psi, psi.center);
    --psi.center;
  }
}

void recanonicalize(Mps& psi, int target) {
  if (target < 0 || target >= psi.L) {
    throw std::invalid_argument("recanonicalize: target out of range");
  }
  // Right-canonicalise everything onto site 0, then shift to the target.
  for (int k = psi.L - 1; k > 0; --k) shift_left(psi, k);
  psi.center = 0;
  move_center(psi, target);
}

double normalize(Mps& psi) {
  const double n = psi.a[psi.center].norm();
  if (n == 0.0) throw std::invalid_argument("normalize: zero state");
  psi.a[psi.center] = psi.a[psi.center].scaled(1.0 / n);
  return n;
}

cplx overlap(const Mps& bra, const Mps& ket) {
  if (bra.L != ket.L || bra.n_max != ket.n_max) {
    throw std::invalid_argument("overlap: state shapes differ");
  }
  DenseTensor env({1, 1});
  env[0] = 1.0;
  for (int k = 0; k < bra.L; ++k) {
    // env(b, k) -> env'(b', k') through the two site tensors.
    DenseTensor t = contract(env, bra.a[k].conjugate(), {{0, 0}});
    env = contract(t, ket.a[k], {{0, 0}, {1, 1}});
  }
  return env[0];
}

double energy_expectation(const Mps& psi, const Mpo& h) {
  if (psi.L != h.L || psi.site_dim() != h.site_dim()) {
    throw std::invalid_argument("energy_expectation: shape mismatch");
  }
  DenseTensor env({1, 1, 1});
  env[0] = 1.0;
  for (int k = 0; k < psi.L; ++k) {
    // env(bra, mpo, ket), contracted through bra tensor, W, ket tensor.
    DenseTensor t = contract(env, psi.a[k].conjugate(), {{0, 0}});
    t = contract(t, h.w[k], {{0, 0}, {2, 2}});
    env = contract(t, psi.a[k], {{0, 0}, {3, 1}});
  }
  const cplx e = env[0];
  if (std::abs(e.imag()) > 1e-10 * std::max(1.0, std::abs(e.real()))) {
    throw std::logic_error("energy_expectation: non-Hermitian residual " +
                           std::to_string(e.imag()));
  }
  return e.real();
}

std::pair<Mps, double> apply_product_operator(const Mps& psi,
                                              const ProductOperator& op) {
  op.validate();
  if (op.L != psi.L || op.n_max != psi.n_max) {
    throw std::invalid_argument("apply_product_operator: operator mismatch");
  }
  Mps out = psi;
  const long d = psi.site_dim();
  for (const auto& [site, f] : op.factors) {
    DenseTensor o({d, d});
    for (long r = 0; r < d; ++r) {
      for (long c = 0; c < d; ++c) o[r * d + c] = f.mat(r, c);
    }
    // (p_out, l, r) -> (l, p_out, r)
    out.a[site] = permute(contract(o, out.a[site], {{1, 1}}), {1, 0, 2});
  }
  recanonicalize(out, psi.center);
  const double n = normalize(out);
  return {std::move(out), n};
}

Mps dense_to_mps(const Eigen::VectorXcd& state, int L, int n_max) {
  if (L < 1 || n_max < 1) {
    throw std::invalid_argument("dense_to_mps: need L >= 1 and n_max >= 1");
  }
  const long d = 2 * n_max + 1;
  long dim = 1;
  for (int k = 0; k < L; ++k) dim *= d;
  if (state.size() != dim) {
    throw std::invalid_argument("dense_to_mps: state dimension mismatch");
  }

  Mps psi;
  psi.L = L;
  psi.n_max = n_max;
  psi.discarded.assign(L - 1, 0.0);
  psi.a.resize(L);

  DenseTensor carry({1, dim},
                    std::vector<cplx>(state.data(), state.data() + dim));
  long rest = dim;
  long chi_l = 1;
  for (int k = 0; k + 1 < L; ++k) {
    rest /= d;
    TruncatedSvd svd =
        truncated_svd(carry.reshaped({chi_l * d, rest}), exact_spec());
    const long chi = static_cast<long>(svd.singular_values.size());
    psi.a[k] = std::move(svd.left).reshaped({chi_l, d, chi});
    carry = scale_rows(svd.right, svd.singular_values);
    chi_l = chi;
  }
  psi.a[L - 1] = std::move(carry).reshaped({chi_l, d, 1});
  psi.center = L - 1;
  psi.validate();
  return psi;
}

Eigen::VectorXcd mps_to_dense(const Mps& psi) {
  psi.validate();
  const long d = psi.site_dim();
  long dim = 1;
  for (int k = 0; k < psi.L; ++k) {
    dim *= d;
    if (dim > kDenseGuard) {
      throw std::invalid_argument(
          "mps_to_dense: dimension exceeds the materialisation guard");
    }
  }
  DenseTensor acc = psi.a[0].reshaped({d, psi.a[0].extent(2)});
  long grown = d;
  for (int k = 1; k < psi.L; ++k) {
    DenseTensor t = contract(acc, psi.a[k], {{1, 0}});
    grown *= d;
    acc = std::move(t).reshaped({grown, psi.a[k].extent(2)});
  }
  Eigen::VectorXcd out(dim);
  for (long i = 0; i < dim; ++i) out[i] = acc[i];
  return out;
}

void save_mps(const Mps& psi, const std::string& path) {
  psi.validate();
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("save_mps: cannot open " + path);

  f.write(kMagic, sizeof(kMagic));
  auto put_u32 = [&](std::uint32_t v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  auto put_i64 = [&](std::int64_t v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  put_u32(kVersionTag);
  put_u32(static_cast<std::uint32_t>(psi.L));
  put_u32(static_cast<std::uint32_t>(psi.n_max));
  put_u32(static_cast<std::uint32_t>(psi.center));
  for (double w : psi.discarded) {
    f.write(reinterpret_cast<const char*>(&w), sizeof(w));
  }
  for (const DenseTensor& t : psi.a) {
    for (int ax = 0; ax < 3; ++ax) put_i64(t.extent(ax));
    f.write(reinterpret_cast<const char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(cplx)));
  }
  if (!f) throw std::runtime_error("save_mps: write failed for " + path);
}

Mps load_mps(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_mps: cannot open " + path);

  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("load_mps: bad checkpoint header in " + path);
  }
  auto get_u32 = [&]() {
    std::uint32_t v = 0;
    f.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  };
  auto get_i64 = [&]() {
    std::int64_t v = 0;
    f.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  };
  if (get_u32() != kVersionTag) {
    throw std::runtime_error("load_mps: unsupported checkpoint version in " +
                             path);
  }
  Mps psi;
  psi.L = static_cast<int>(get_u32());
  psi.n_max = static_cast<int>(get_u32());
  psi.center = static_cast<int>(get_u32());
  if (!f || psi.L < 1 || psi.L > 100000 || psi.n_max < 1) {
    throw std::runtime_error("load_mps: implausible metadata in " + path);
  }
  psi.discarded.resize(psi.L - 1);
  for (double& w : psi.discarded) {
    f.read(reinterpret_cast<char*>(&w), sizeof(w));
  }
  for (int k = 0; k < psi.L; ++k) {
    std::vector<long> shape(3);
    long sz = 1;
    for (int ax = 0; ax < 3; ++ax) {
      shape[ax] = static_cast<long>(get_i64());
      if (shape[ax] < 1 || shape[ax] > (1L << 30)) {
        throw std::runtime_error("load_mps: implausible tensor shape in " +
                                 path);
      }
      sz *= shape[ax];
    }
    std::vector<cplx> data(sz);
    f.read(reinterpret_cast<char*>(data.data()),
           static_cast<std::streamsize>(sz * sizeof(cplx)));
    psi.a.emplace_back(std::move(shape), std::move(data));
  }
  if (!f) throw std::runtime_error("load_mps: truncated checkpoint " + path);
  psi.validate();
  return psi;
}

}  // namespace rotor
