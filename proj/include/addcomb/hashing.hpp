#pragma once

// Almost-additive hashing {-N..N} -> F_p with a small, enumerable family.
//   h(x) = <c, (x mod q_1, ..., x mod q_{m-1}, 1)>   over F_p
// where c runs over an AGHP powering sample space built on F_{p^r}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "addcomb/errors.hpp"
#include "addcomb/primes.hpp"
#include "addcomb/vecmath.hpp"

namespace addcomb {

using u64 = std::uint64_t;

// Arithmetic modulo a prime p < 2^32 with Barrett reduction.
class Fp {
 public:
  Fp() = default;
  explicit Fp(u64 p) : p_(p) {
    if (p < 2 || p >= (u64{1} << 32) || !is_prime(p)) throw invalid_parameter("Fp: modulus must be a prime below 2^32");
    mu_ = static_cast<u64>((static_cast<unsigned __int128>(1) << 64) / p);
  }

  u64 p() const { return p_; }
  u64 reduce(u64 x) const {
    const u64 q = static_cast<u64>((static_cast<unsigned __int128>(x) * mu_) >> 64);
    u64 r = x - q * p_;
    return r >= p_ ? r - p_ : r;
  }
  u64 add(u64 a, u64 b) const { return reduce(a + b); }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + p_ - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : p_ - a; }
  u64 mul(u64 a, u64 b) const { return reduce(a * b); }
  u64 from_int(Index x) const { return static_cast<u64>(floor_mod(x, static_cast<Index>(p_))); }
  u64 inv(u64 a) const {
    if (a == 0) throw invalid_parameter("Fp: inverse of zero");
    return pow_mod(a, p_ - 2, p_);
  }

 private:
  u64 p_ = 2;
  u64 mu_ = 0;
};

namespace detail {

using Poly = std::vector<u64>;  // low degree first, no trailing zeros (zero poly is empty)

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mod(Poly a, const Poly& f, const Fp& F) {
  trim(a);
  const std::size_t df = f.size() - 1;
  const u64 lead_inv = F.inv(f.back());
  while (a.size() > df) {
    const u64 coef = F.mul(a.back(), lead_inv);
    const std::size_t shift = a.size() - 1 - df;
    for (std::size_t i = 0; i <= df; ++i) a[shift + i] = F.sub(a[shift + i], F.mul(coef, f[i]));
    trim(a);
  }
  return a;
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, const Fp& F) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a[i], b[j]));
  }
  return poly_mod(std::move(r), f, F);
}

inline Poly poly_powmod(Poly b, u64 e, const Poly& f, const Fp& F) {
  Poly r{1};
  b = poly_mod(std::move(b), f, F);
  while (e) {
    if (e & 1) r = poly_mulmod(r, b, f, F);
    b = poly_mulmod(b, b, f, F);
    e >>= 1;
  }
  return r;
}

inline Poly poly_gcd(Poly a, Poly b, const Fp& F) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    a = poly_mod(std::move(a), b, F);
    std::swap(a, b);
  }
  return a;
}

// Ben-Or: f of degree r is irreducible iff gcd(x^{p^i} - x, f) = 1 for i <= r/2.
inline bool is_irreducible(const Poly& f, const Fp& F) {
  const std::size_t r = f.size() - 1;
  if (r == 1) return true;
  if (f[0] == 0) return false;
  Poly h{0, 1};
  for (std::size_t i = 1; i <= r / 2; ++i) {
    h = poly_powmod(h, F.p(), f, F);
    Poly d = h;
    d.resize(std::max<std::size_t>(d.size(), 2), 0);
    d[1] = F.sub(d[1], 1);
    if (poly_gcd(f, d, F).size() != 1) return false;
  }
  return true;
}

}  // namespace detail

// F_{p^r} as F_p[x] / (f). f is the first monic irreducible when candidates are
// ordered by height (largest coefficient), then lexicographically on
// (c_{r-1}, ..., c_0). Elements are coefficient vectors of length r.
class GaloisField {
 public:
  using Elem = std::vector<u64>;

  GaloisField(u64 p, int r, u64 search_budget = u64{1} << 20) : F_(p), r_(r) {
    if (r < 1) throw invalid_parameter("GaloisField: degree must be positive");
    const auto ru = static_cast<std::size_t>(r);
    detail::Poly f(ru + 1, 0);
    f[ru] = 1;
    u64 tries = 0;
    // Height h = max coefficient; within a height, c_0 runs fastest.
    for (u64 h = 0; h < p && tries < search_budget; ++h) {
      std::fill(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(ru), 0);
      while (tries < search_budget) {
        if (*std::max_element(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(ru)) == h) {
          ++tries;
          if (detail::is_irreducible(f, F_)) {
            f_ = f;
            return;
          }
        }
        std::size_t i = 0;
        while (i < ru && ++f[i] > h) f[i++] = 0;
        if (i == ru) break;
      }
    }
    throw internal_error("GaloisField: no irreducible polynomial within the search budget");
  }

  const Fp& base() const { return F_; }
  int degree() const { return r_; }
  const detail::Poly& modulus() const { return f_; }

  Elem zero() const { return Elem(static_cast<std::size_t>(r_), 0); }
  Elem one() const {
    Elem e = zero();
    e[0] = 1;
    return e;
  }

  // Base-p digits of `code`, lowest first.
  Elem from_digits(const std::vector<u64>& digits) const {
    Elem e = zero();
    for (std::size_t i = 0; i < e.size() && i < digits.size(); ++i) e[i] = digits[i] % F_.p();
    return e;
  }

  Elem mul(const Elem& a, const Elem& b) const {
    detail::Poly pa(a.begin(), a.end()), pb(b.begin(), b.end());
    detail::trim(pa);
    detail::trim(pb);
    detail::Poly r = detail::poly_mulmod(pa, pb, f_, F_);
    r.resize(static_cast<std::size_t>(r_), 0);
    return r;
  }

  Elem add(const Elem& a, const Elem& b) const {
    Elem r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = F_.add(a[i], b[i]);
    return r;
  }

  Elem pow(Elem b, u64 e) const {
    Elem r = one();
    while (e) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }

  // <a, b> viewing both as vectors in F_p^r.
  u64 inner(const Elem& a, const Elem& b) const {
    u64 s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s = F_.add(s, F_.mul(a[i], b[i]));
    return s;
  }

 private:
  Fp F_;
  int r_;
  detail::Poly f_;
};

// The AGHP powering space: for (x, y) in F_q^2 the vector
// (<1, y>, <x, y>, ..., <x^{m-1}, y>) in F_p^m. Member j has y given by the
// low r base-p digits of j and x by the next r digits.
class AghpSpace {
 public:
  AghpSpace(u64 p, int m, int r) : field_(p, r), m_(m) {
    if (m < 1) throw invalid_parameter("AghpSpace: dimension must be positive");
  }

  const GaloisField& field() const { return field_; }
  int dimension() const { return m_; }
  int field_degree() const { return field_.degree(); }
  long double log2_size() const { return 2.0L * field_.degree() * std::log2(static_cast<long double>(field_.base().p())); }
  // q^2, or 0 when it does not fit in 64 bits.
  u64 size_u64() const {
    const long double lg = log2_size();
    if (lg >= 63.0L) return 0;
    u64 q = 1;
    for (int i = 0; i < field_.degree(); ++i) q *= field_.base().p();
    return q * q;
  }

  std::vector<u64> member(u64 j) const {
    const u64 p = field_.base().p();
    const auto r = static_cast<std::size_t>(field_.degree());
    std::vector<u64> dy(r), dx(r);
    for (std::size_t i = 0; i < r; ++i) {
      dy[i] = j % p;
      j /= p;
    }
    for (std::size_t i = 0; i < r; ++i) {
      dx[i] = j % p;
      j /= p;
    }
    return member(field_.from_digits(dx), field_.from_digits(dy));
  }

  std::vector<u64> member(const GaloisField::Elem& x, const GaloisField::Elem& y) const {
    std::vector<u64> v(static_cast<std::size_t>(m_));
    GaloisField::Elem xp = field_.one();
    for (int i = 0; i < m_; ++i) {
      v[static_cast<std::size_t>(i)] = field_.inner(xp, y);
      xp = field_.mul(xp, x);
    }
    return v;
  }

 private:
  GaloisField field_;
  int m_;
};

// r = ceil(log_p(m / eps)) with eps = 1 / (2 p^{3k/2 - 1}).
inline int default_field_degree(u64 p, int m, int k) {
  const double lp = std::log(static_cast<double>(p));
  const double need = std::log(2.0 * m) / lp + 1.5 * k - 1.0;
  return std::max(1, static_cast<int>(std::ceil(need - 1e-9)));
}

struct BiasedSet {
  u64 p = 2;
  int m = 1;
  int k = 1;
  int field_degree = 1;
  std::vector<std::vector<u64>> members;
};

// All q^2 members; refuses to materialize more than `budget` coordinates.
inline BiasedSet build_biased_set(u64 p, int m, int k, int field_degree = 0, double budget = 1 << 24) {
  if (k < 1) throw invalid_parameter("build_biased_set: k must be positive");
  const int r = field_degree > 0 ? field_degree : default_field_degree(p, m, k);
  const double q2 = std::pow(static_cast<double>(p), 2.0 * r);
  if (q2 * m > budget) throw budget_exceeded("build_biased_set: sample space too large to list");
  AghpSpace space(p, m, r);
  const u64 n = space.size_u64();
  BiasedSet s{p, m, k, r, {}};
  s.members.reserve(n);
  for (u64 j = 0; j < n; ++j) s.members.push_back(space.member(j));
  return s;
}

struct HashConfig {
  int k = 3;
  double q_factor = 100;   // Q = q_factor * log2 N
  u64 p = 0;               // 0: smallest prime >= max(p_floor, log2(N)^{2k})
  u64 p_floor = 2;
  int field_degree = 0;    // 0: derived from p, m, k
  std::vector<u64> moduli; // explicit q_1..q_{m-1}; empty: primes from [Q/2, Q]
};

struct HashSpec {
  Index universe = 1;
  u64 p = 2;
  std::vector<u64> moduli;  // q_1..q_{m-1}
  std::vector<u64> c;       // c_1..c_m
  std::vector<u64> delta;   // Delta_h, sorted
  Fp field;                 // cached arithmetic for p
};

namespace detail {

inline Fp field_of(const HashSpec& h) { return h.field.p() == h.p ? h.field : Fp(h.p); }

inline std::vector<u64> sumset_mod(const std::vector<u64>& a, const std::vector<u64>& b, const Fp& F) {
  std::vector<u64> r;
  r.reserve(a.size() * b.size());
  for (u64 x : a) {
    for (u64 y : b) r.push_back(F.add(x, y));
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

}  // namespace detail

// Delta_h = {0, -q_1 c_1} + ... + {0, -q_{m-1} c_{m-1}} + c_m.
inline std::vector<u64> compute_delta(u64 p, const std::vector<u64>& moduli, const std::vector<u64>& c) {
  const Fp F(p);
  std::vector<u64> d{c.back()};
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    d = detail::sumset_mod(d, {0, F.neg(F.mul(F.reduce(moduli[i]), c[i]))}, F);
  }
  return d;
}

inline u64 hash_eval(const HashSpec& h, Index x) {
  if (x < -h.universe || x > h.universe) throw invalid_parameter("hash_eval: argument outside [-N, N]");
  const Fp F = detail::field_of(h);
  u64 s = h.c.back();
  for (std::size_t i = 0; i < h.moduli.size(); ++i) {
    const u64 w = F.reduce(static_cast<u64>(floor_mod(x, static_cast<Index>(h.moduli[i]))));
    s = F.add(s, F.mul(h.c[i], w));
  }
  return s;
}

// Delta'_h = 3({0} u Delta_h).
inline std::vector<u64> delta_prime(const HashSpec& h) {
  const Fp F = detail::field_of(h);
  std::vector<u64> base = h.delta;
  base.push_back(0);
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  return detail::sumset_mod(detail::sumset_mod(base, base, F), base, F);
}

class HashFamily {
 public:
  HashFamily(Index universe, HashConfig cfg) : n_(universe), cfg_(std::move(cfg)) {
    if (universe < 2) throw invalid_parameter("HashFamily: universe must be at least 2");
    if (cfg_.k < 1) throw invalid_parameter("HashFamily: k must be positive");
    const double lg = std::log2(static_cast<double>(universe));
    q_ = cfg_.q_factor * lg;
    const double p_need = std::pow(lg, 2.0 * cfg_.k);

    if (cfg_.p == 0) {
      const double lo = std::max(static_cast<double>(cfg_.p_floor), p_need);
      if (lo >= 4294967296.0) throw invalid_parameter("HashFamily: log2(N)^{2k} exceeds the 32-bit prime range; set p explicitly");
      p_ = next_prime(static_cast<u64>(std::ceil(lo)));
    } else {
      if (!is_prime(cfg_.p)) throw invalid_parameter("HashFamily: p must be prime");
      p_ = cfg_.p;
    }
    if (static_cast<double>(p_) < p_need) note("p=" + std::to_string(p_) + " below log2(N)^{2k}");

    if (!cfg_.moduli.empty()) {
      moduli_ = cfg_.moduli;
      for (u64 q : moduli_) {
        if (q < 2) throw invalid_parameter("HashFamily: moduli must be at least 2");
      }
      note("explicit moduli (" + std::to_string(moduli_.size()) + ") instead of primes from [Q/2, Q]");
    } else {
      pick_moduli(lg);
    }
    for (u64 q : moduli_) {
      if (static_cast<double>(q) >= static_cast<double>(p_)) {
        note("modulus " + std::to_string(q) + " not below p");
        break;
      }
    }
    m_ = static_cast<int>(moduli_.size()) + 1;
    r_ = cfg_.field_degree > 0 ? cfg_.field_degree : default_field_degree(p_, m_, cfg_.k);
    if (cfg_.field_degree > 0) note("field degree " + std::to_string(r_) + " set explicitly");
    space_ = std::make_unique<AghpSpace>(p_, m_, r_);
  }

  Index universe() const { return n_; }
  u64 p() const { return p_; }
  int m() const { return m_; }
  int k() const { return cfg_.k; }
  int field_degree() const { return r_; }
  double big_q() const { return q_; }
  const std::vector<u64>& moduli() const { return moduli_; }
  const std::vector<std::string>& notes() const { return notes_; }
  const AghpSpace& space() const { return *space_; }

  long double log2_size() const { return space_->log2_size(); }
  u64 size_u64() const { return space_->size_u64(); }
  // log2(4 m^2 p^{3k})
  long double log2_size_bound() const {
    return 2.0L + 2.0L * std::log2(static_cast<long double>(m_)) + 3.0L * cfg_.k * std::log2(static_cast<long double>(p_));
  }

  HashSpec member(u64 j) const {
    HashSpec h;
    h.universe = n_;
    h.p = p_;
    h.moduli = moduli_;
    h.c = space_->member(j);
    h.delta = compute_delta(p_, moduli_, h.c);
    h.field = space_->field().base();
    return h;
  }

 private:
  void note(std::string s) { notes_.push_back(std::move(s)); }

  // Distinct primes ascending from Q/2 until the product reaches N log^{2k} N.
  void pick_moduli(double lg) {
    const double lo_target = lg + 2.0 * cfg_.k * std::log2(lg);
    const double hi_target = lg + 3.0 * cfg_.k * std::log2(lg);
    const auto lo = static_cast<u64>(std::ceil(q_ / 2.0)), hi = static_cast<u64>(std::floor(q_));
    double acc = 0;
    for (u64 q : primes_in_range(lo, hi)) {
      if (acc >= lo_target) break;
      moduli_.push_back(q);
      acc += std::log2(static_cast<double>(q));
    }
    if (acc < lo_target) {
      throw invalid_parameter("HashFamily: primes in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                              "] have product 2^" + std::to_string(acc) + " < N log^{2k} N = 2^" +
                              std::to_string(lo_target) + "; raise q_factor");
    }
    if (acc > hi_target) note("modulus product 2^" + std::to_string(acc) + " above N log^{3k} N");
  }

  Index n_;
  HashConfig cfg_;
  double q_ = 0;
  u64 p_ = 2;
  int m_ = 1;
  int r_ = 1;
  std::vector<u64> moduli_;
  std::vector<std::string> notes_;
  std::unique_ptr<AghpSpace> space_;
};

inline HashFamily build_hash_family(Index universe, u64 p, int k, HashConfig cfg = {}) {
  cfg.p = p;
  cfg.k = k;
  return HashFamily(universe, std::move(cfg));
}

// Is there beta in [-ell, ell]^k, not all zero, with sum beta = 0 and sum beta_j x_j = 0?
inline bool has_relation(const std::vector<Index>& values, Index ell, double budget = 1e8) {
  if (ell < 1) throw invalid_parameter("has_relation: ell must be positive");
  const std::size_t k = values.size();
  if (k < 2) return false;
  // beta_k is forced to -(beta_1 + ... + beta_{k-1})
  if (std::pow(2.0 * static_cast<double>(ell) + 1.0, static_cast<double>(k - 1)) > budget) {
    throw budget_exceeded("has_relation: (2 ell + 1)^(k - 1) above budget");
  }
  std::vector<Index> beta(k - 1, -ell);
  while (true) {
    Index sum = 0;
    __int128 dot = 0;
    bool nonzero = false;
    for (std::size_t j = 0; j + 1 < k; ++j) {
      sum += beta[j];
      dot += static_cast<__int128>(beta[j]) * values[j];
      nonzero |= beta[j] != 0;
    }
    const Index last = -sum;
    if (nonzero && last >= -ell && last <= ell && dot + static_cast<__int128>(last) * values[k - 1] == 0) return true;
    std::size_t i = 0;
    while (i < beta.size() && ++beta[i] > ell) beta[i++] = -ell;
    if (i == beta.size()) return false;
  }
}

}  // namespace addcomb
