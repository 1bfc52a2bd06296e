#include "rotor/mpo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rotor {

namespace {

// Write local operator `op` into W at virtual-bond slot (a, b).
void put(DenseTensor& w, long a, long b, const Eigen::MatrixXcd& op) {
  const long d = op.rows();
  for (long r = 0; r < d; ++r) {
    for (long c = 0; c < d; ++c) w.at({a, b, r, c}) = op(r, c);
  }
}

constexpr long kDenseGuard = 1L << 14;

long dense_dim(int L, int n_max) {
  long dim = 1;
  for (int k = 0; k < L; ++k) {
    dim *= 2 * n_max + 1;
    if (dim > kDenseGuard) {
      throw std::invalid_argument(
          "dense expansion: dimension exceeds the materialisation guard (" +
          std::to_string(kDenseGuard) + ")");
    }
  }
  return dim;
}

}  // namespace

void Mpo::validate() const {
  if (static_cast<int>(w.size()) != L || L < 2) {
    throw std::invalid_argument("Mpo: tensor count does not match L");
  }
  const long d = site_dim();
  if (w.front().extent(0) != 1 || w.back().extent(1) != 1) {
    throw std::invalid_argument("Mpo: boundary bonds must have extent 1");
  }
  for (int k = 0; k < L; ++k) {
    if (w[k].rank() != 4 || w[k].extent(2) != d || w[k].extent(3) != d) {
      throw std::invalid_argument("Mpo: bad site tensor at " + std::to_string(k));
    }
    if (k + 1 < L && w[k].extent(1) != w[k + 1].extent(0)) {
      throw std::invalid_argument("Mpo: bond mismatch at " + std::to_string(k));
    }
  }
}

Mpo build_hamiltonian(const ModelParams& p) {
  p.validate();
  if (p.bc != Boundary::open) {
    throw std::invalid_argument(
        "build_hamiltonian: the MPO path supports open boundaries only");
  }
  const int d = 2 * p.n_max + 1;

  const Eigen::MatrixXcd id = identity_operator(p.n_max).mat;
  const Eigen::MatrixXcd n = charge_operator(p.n_max).mat;
  const Eigen::MatrixXcd e1 = phase_raise_operator(p.n_max, 1).mat;
  const Eigen::MatrixXcd cos1 = cos_phase_operator(p.n_max, 1).mat;
  const Eigen::MatrixXcd cos2 = cos_phase_operator(p.n_max, 2).mat;

  const Eigen::MatrixXcd h_loc =
      n * n - p.eg * n - p.ej1 * cos1 - p.ej2 * cos2;

  // Virtual-bond slots: 0 identity-after, 1..3 pending bond operator
  // (n, E, E^dag), 4 identity-before.
  const long w5 = 5;
  DenseTensor mid({w5, w5, d, d});
  put(mid, 0, 0, id);
  put(mid, 1, 0, n);
  put(mid, 2, 0, e1.adjoint());
  put(mid, 3, 0, e1);
  put(mid, 4, 0, h_loc);
  put(mid, 4, 1, p.eps * n);
  put(mid, 4, 2, -0.5 * p.ej * e1);
  put(mid, 4, 3, -0.5 * p.ej * e1.adjoint());
  put(mid, 4, 4, id);

  DenseTensor first({1, w5, d, d});
  put(first, 0, 0, h_loc);
  put(first, 0, 1, p.eps * n);
  put(first, 0, 2, -0.5 * p.ej * e1);
  put(first, 0, 3, -0.5 * p.ej * e1.adjoint());
  put(first, 0, 4, id);

  DenseTensor last({w5, 1, d, d});
  put(last, 0, 0, id);
  put(last, 1, 0, n);
  put(last, 2, 0, e1.adjoint());
  put(last, 3, 0, e1);
  put(last, 4, 0, h_loc);

  Mpo mpo;
  mpo.L = p.L;
  mpo.n_max = p.n_max;
  mpo.w.push_back(first);
  for (int k = 1; k + 1 < p.L; ++k) mpo.w.push_back(mid);
  mpo.w.push_back(last);
  mpo.validate();
  return mpo;
}

Mpo scaled_parity_mpo(int L, int n_max, cplx c) {
  const Eigen::MatrixXcd p = parity_factor(n_max).mat;
  const int d = 2 * n_max + 1;
  Mpo mpo;
  mpo.L = L;
  mpo.n_max = n_max;
  for (int k = 0; k < L; ++k) {
    DenseTensor w({1, 1, d, d});
    put(w, 0, 0, k == 0 ? (c * p).eval() : p);
    mpo.w.push_back(std::move(w));
  }
  mpo.validate();
  return mpo;
}

Mpo mpo_add(const Mpo& a, const Mpo& b) {
  a.validate();
  b.validate();
  if (a.L != b.L || a.n_max != b.n_max) {
    throw std::invalid_argument("mpo_add: operand shapes differ");
  }
  const long d = a.site_dim();
  Mpo out;
  out.L = a.L;
  out.n_max = a.n_max;
  for (int k = 0; k < a.L; ++k) {
    const bool edge_l = (k == 0), edge_r = (k == a.L - 1);
    const long al = a.w[k].extent(0), ar = a.w[k].extent(1);
    const long bl = b.w[k].extent(0), br = b.w[k].extent(1);
    const long wl = edge_l ? 1 : al + bl;
    const long wr = edge_r ? 1 : ar + br;
    DenseTensor w({wl, wr, d, d});
    // Block-diagonal embedding; boundary bonds concatenate instead.
    for (long i = 0; i < al; ++i) {
      for (long j = 0; j < ar; ++j) {
        const long ti = edge_l ? 0 : i, tj = edge_r ? 0 : j;
        for (long r = 0; r < d; ++r)
          for (long c = 0; c < d; ++c)
            w.at({ti, tj, r, c}) += a.w[k].at({i, j, r, c});
      }
    }
    for (long i = 0; i < bl; ++i) {
      for (long j = 0; j < br; ++j) {
        const long ti = edge_l ? 0 : al + i, tj = edge_r ? 0 : ar + j;
        for (long r = 0; r < d; ++r)
          for (long c = 0; c < d; ++c)
            w.at({ti, tj, r, c}) += b.w[k].at({i, j, r, c});
      }
    }
    out.w.push_back(std::move(w));
  }
  out.validate();
  return out;
}

Eigen::MatrixXcd mpo_to_dense(const Mpo& m) {
  m.validate();
  const long dim = dense_dim(m.L, m.n_max);
  const long d = m.site_dim();

  // Accumulated tensor A(bond, out_indices, in_indices), grown site by site.
  DenseTensor acc = m.w[0].reshaped({m.w[0].extent(1), d, d});
  long grown = d;
  for (int k = 1; k < m.L; ++k) {
    // acc(b, O, I) * w(b, b', r, c) -> (O, I, b', r, c)
    DenseTensor next = contract(acc, m.w[k], {{0, 0}});
    // -> (b', O, r, I, c)
    next = permute(next, {2, 0, 3, 1, 4});
    grown *= d;
    const long wb = next.extent(0);
    acc = std::move(next).reshaped({wb, grown, grown});
  }

  Eigen::MatrixXcd out(dim, dim);
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c) out(r, c) = acc.at({0, r, c});
  return out;
}

void ProductOperator::validate() const {
  if (L < 1) throw std::invalid_argument("ProductOperator: L must be >= 1");
  int prev = -1;
  for (const auto& [site, op] : factors) {
    if (site <= prev || site >= L) {
      throw std::invalid_argument(
          "ProductOperator: sites must be strictly ascending within [0, L)");
    }
    if (op.basis.n_max != n_max) {
      throw std::invalid_argument("ProductOperator: factor basis mismatch");
    }
    prev = site;
  }
}

ProductOperator build_soliton_pair(int L, int j, int d, double s, int q,
                                   int n_max) {
  if (s != 0.0 && s != 0.5 && s != 1.0) {
    throw std::invalid_argument("build_soliton_pair: s must be 0, 1/2 or 1");
  }
  if (q != 1 && q != -1) {
    throw std::invalid_argument("build_soliton_pair: q must be +1 or -1");
  }
  if (d < 0 || j < 0 || j + d >= L) {
    throw std::invalid_argument(
        "build_soliton_pair: need 0 <= j and j + d < L");
  }
  const int a = static_cast<int>(2 * s);

  ProductOperator op;
  op.L = L;
  op.n_max = n_max;

  // e^{-i q pi n} on integer charges is diag((-1)^n) for either sign of q.
  const LocalOperator string_factor = parity_factor(n_max);

  if (d == 0) {
    if (a != 0) {
      LocalOperator e = phase_raise_operator(n_max, a);
      op.factors.emplace_back(j, e.dagger() * e);
    }
    op.validate();
    return op;
  }

  if (a != 0) {
    LocalOperator e = phase_raise_operator(n_max, a);
    op.factors.emplace_back(j, e.dagger() * string_factor);
  } else {
    op.factors.emplace_back(j, string_factor);
  }
  for (int m = j + 1; m < j + d; ++m) op.factors.emplace_back(m, string_factor);
  if (a != 0) {
    op.factors.emplace_back(j + d, phase_raise_operator(n_max, a));
  }
  op.validate();
  return op;
}

ProductOperator build_global_parity(int L, int n_max) {
  ProductOperator op;
  op.L = L;
  op.n_max = n_max;
  for (int k = 0; k < L; ++k) op.factors.emplace_back(k, parity_factor(n_max));
  op.validate();
  return op;
}

Eigen::MatrixXcd product_to_dense(const ProductOperator& op) {
  op.validate();
  const long dim = dense_dim(op.L, op.n_max);
  const long d = 2 * op.n_max + 1;

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  auto factor_at = [&](int site) -> Eigen::MatrixXcd {
    for (const auto& [s, f] : op.factors) {
      if (s == site) return f.mat;
    }
    return Eigen::MatrixXcd::Identity(d, d);
  };
  for (int k = 0; k < op.L; ++k) {
    const Eigen::MatrixXcd f = factor_at(k);
    Eigen::MatrixXcd next(out.rows() * d, out.cols() * d);
    for (long i = 0; i < out.rows(); ++i) {
      for (long j = 0; j < out.cols(); ++j) {
        next.block(i * d, j * d, d, d) = out(i, j) * f;
      }
    }
    out = std::move(next);
  }
  if (out.rows() != dim) {
    throw std::logic_error("product_to_dense: dimension bookkeeping error");
  }
  return out;
}

}  // namespace rotor
