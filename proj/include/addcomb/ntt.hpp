#pragma once

// Exact integer convolution: number-theoretic transforms over up to five
// word-size primes, recombined with Garner's algorithm into 128-bit integers.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "addcomb/errors.hpp"

namespace addcomb::ntt {

using u128 = unsigned __int128;

// Largest transform length supported by every prime below.
inline constexpr std::size_t kMaxLength = std::size_t{1} << 23;

template <std::uint32_t Mod, std::uint32_t Gen>
struct PrimeField {
  static constexpr std::uint32_t mod = Mod;

  static std::uint32_t mul(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % Mod);
  }

  static std::uint32_t pow(std::uint32_t b, std::uint64_t e) {
    std::uint32_t r = 1;
    while (e) {
      if (e & 1) r = mul(r, b);
      b = mul(b, b);
      e >>= 1;
    }
    return r;
  }

  static void transform(std::vector<std::uint32_t>& a, bool invert) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<std::uint32_t> wp;
    for (std::size_t len = 2; len <= n; len <<= 1) {
      std::uint32_t w = pow(Gen, (Mod - 1) / len);
      if (invert) w = pow(w, Mod - 2);
      const std::size_t half = len >> 1;
      wp.resize(half);
      wp[0] = 1;
      for (std::size_t j = 1; j < half; ++j) wp[j] = mul(wp[j - 1], w);
      for (std::size_t i = 0; i < n; i += len) {
        std::uint32_t* lo = a.data() + i;
        std::uint32_t* hi = lo + half;
        for (std::size_t j = 0; j < half; ++j) {
          const std::uint32_t u = lo[j];
          const std::uint32_t v = mul(hi[j], wp[j]);
          const std::uint32_t s = u + v;
          lo[j] = s >= Mod ? s - Mod : s;
          hi[j] = u >= v ? u - v : u + Mod - v;
        }
      }
    }
    if (invert) {
      const std::uint32_t inv_n = pow(static_cast<std::uint32_t>(n % Mod), Mod - 2);
      for (auto& x : a) x = mul(x, inv_n);
    }
  }

  // Linear convolution of residue vectors.
  static std::vector<std::uint32_t> convolve(std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) {
    const std::size_t out = a.size() + b.size() - 1;
    std::size_t n = 1;
    while (n < out) n <<= 1;
    if (n > kMaxLength) throw budget_exceeded("ntt: transform length above 2^23");
    a.resize(n);
    b.resize(n);
    transform(a, false);
    transform(b, false);
    for (std::size_t i = 0; i < n; ++i) a[i] = mul(a[i], b[i]);
    transform(a, true);
    a.resize(out);
    return a;
  }
};

using F0 = PrimeField<998244353u, 3u>;
using F1 = PrimeField<167772161u, 3u>;
using F2 = PrimeField<469762049u, 3u>;
using F3 = PrimeField<754974721u, 11u>;
using F4 = PrimeField<2013265921u, 31u>;

inline constexpr std::array<std::uint32_t, 5> kModuli = {F0::mod, F1::mod, F2::mod, F3::mod, F4::mod};

namespace detail {

template <class F, class T>
std::vector<std::uint32_t> reduce(std::span<const T> v) {
  std::vector<std::uint32_t> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = static_cast<std::uint32_t>(static_cast<u128>(v[i]) % F::mod);
  return r;
}

template <class T>
std::vector<std::uint32_t> convolve_in(int which, std::span<const T> a, std::span<const T> b) {
  switch (which) {
    case 0: return F0::convolve(reduce<F0>(a), reduce<F0>(b));
    case 1: return F1::convolve(reduce<F1>(a), reduce<F1>(b));
    case 2: return F2::convolve(reduce<F2>(a), reduce<F2>(b));
    case 3: return F3::convolve(reduce<F3>(a), reduce<F3>(b));
    default: return F4::convolve(reduce<F4>(a), reduce<F4>(b));
  }
}

inline int primes_needed(u128 bound) {
  u128 prod = 1;
  for (int k = 0; k < 5; ++k) {
    prod *= kModuli[k];
    if (bound < prod) return k + 1;
    if (k == 3) break;  // the fifth product no longer fits in 128 bits
  }
  return 5;
}

}  // namespace detail

// Exact linear convolution of nonnegative integer vectors. `bound` must dominate
// every output coordinate; it decides how many primes are used.
template <class T>
std::vector<u128> convolve_exact(std::span<const T> a, std::span<const T> b, u128 bound) {
  if (a.empty() || b.empty()) return {};
  if (bound >= (u128{1} << 127)) throw arithmetic_overflow("ntt: output bound reaches 2^127");
  const std::size_t out = a.size() + b.size() - 1;
  const std::size_t small = std::min(a.size(), b.size());
  if (small <= 32 || static_cast<u128>(a.size()) * b.size() <= (1u << 15)) {
    std::vector<u128> r(out, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      const u128 ai = static_cast<u128>(a[i]);
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += ai * static_cast<u128>(b[j]);
    }
    return r;
  }
  const int k = detail::primes_needed(bound);
  std::array<std::vector<std::uint32_t>, 5> res;
  for (int i = 0; i < k; ++i) res[i] = detail::convolve_in<T>(i, a, b);
  // Garner: x = t0 + t1*p0 + t2*p0*p1 + ...
  std::array<std::array<std::uint64_t, 5>, 5> inv{};
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < i; ++j) {
      std::uint64_t base = kModuli[j] % kModuli[i];
      std::uint64_t e = kModuli[i] - 2, r = 1;
      while (e) {
        if (e & 1) r = r * base % kModuli[i];
        base = base * base % kModuli[i];
        e >>= 1;
      }
      inv[i][j] = r;
    }
  }
  std::vector<u128> r(out);
  for (std::size_t idx = 0; idx < out; ++idx) {
    std::array<std::uint64_t, 5> t{};
    u128 x = 0, radix = 1;
    for (int i = 0; i < k; ++i) {
      const std::uint64_t pi = kModuli[i];
      std::uint64_t v = res[i][idx];
      for (int j = 0; j < i; ++j) {
        v = (v + pi - t[j] % pi) % pi;
        v = v * inv[i][j] % pi;
      }
      t[i] = v;
      x += static_cast<u128>(v) * radix;
      if (i + 1 < k) radix *= kModuli[i];
    }
    r[idx] = x;
  }
  return r;
}

// Exact linear convolution of nonnegative 64-bit counts; throws on overflow.
inline std::vector<std::int64_t> convolve_counts(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
  if (a.empty() || b.empty()) return {};
  u128 sa = 0, sb = 0, ma = 0, mb = 0;
  for (auto x : a) {
    if (x < 0) throw invalid_parameter("convolve_counts: negative count");
    sa += static_cast<u128>(x);
    ma = std::max<u128>(ma, static_cast<u128>(x));
  }
  for (auto x : b) {
    if (x < 0) throw invalid_parameter("convolve_counts: negative count");
    sb += static_cast<u128>(x);
    mb = std::max<u128>(mb, static_cast<u128>(x));
  }
  // Each coordinate is at most min(sum a * max b, max a * sum b).
  const u128 lim = u128{1} << 126;
  auto capped = [&](u128 s, u128 m) -> u128 {
    if (m != 0 && s > lim / m) return lim;
    return s * m;
  };
  const u128 bound = std::min(capped(sa, mb), capped(ma, sb));
  if (bound >= lim) throw arithmetic_overflow("convolve_counts: output bound too large");
  auto wide = convolve_exact<std::int64_t>(a, b, bound);
  std::vector<std::int64_t> r(wide.size());
  for (std::size_t i = 0; i < wide.size(); ++i) {
    if (wide[i] > static_cast<u128>(std::numeric_limits<std::int64_t>::max())) {
      throw arithmetic_overflow("convolve_counts: coordinate exceeds int64");
    }
    r[i] = static_cast<std::int64_t>(wide[i]);
  }
  return r;
}

}  // namespace addcomb::ntt
