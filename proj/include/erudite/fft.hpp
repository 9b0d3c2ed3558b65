#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "erudite/errors.hpp"

namespace erudite::dsp {

using cplx = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

}  // namespace detail

// DFT of arbitrary length. Power-of-two sizes go straight to radix-2; other
// sizes use Bluestein's chirp-z algorithm (exact-length DFT, O(n log n)).
inline void fft(std::vector<cplx>& a, bool inverse = false) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (detail::is_pow2(n)) {
    detail::fft_pow2(a, inverse);
    return;
  }
  // Bluestein: x_k * chirp_k convolved with conj chirp.
  const std::size_t m = detail::next_pow2(2 * n + 1);
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small for large k.
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = (inverse ? 1.0 : -1.0) * M_PI * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = cplx(std::cos(ang), std::sin(ang));
  }
  std::vector<cplx> fa(m, cplx(0, 0)), fb(m, cplx(0, 0));
  for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * chirp[k];
  fb[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) fb[k] = fb[m - k] = std::conj(chirp[k]);
  detail::fft_pow2(fa, false);
  detail::fft_pow2(fb, false);
  for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
  detail::fft_pow2(fa, true);
  for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * chirp[k];
  if (inverse) {
    const double invn = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= invn;
  }
}

inline std::vector<cplx> fft_real(const std::vector<double>& x, bool inverse = false) {
  std::vector<cplx> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = cplx(x[i], 0.0);
  fft(a, inverse);
  return a;
}

// One-sided periodogram PSD density (unit^2 / Hz), rectangular window.
//
// Normalised so that sum(psd) * (fs/n) equals the mean-square of x (discrete
// Parseval). freqs_hz[k] = k * fs / n for k = 0 .. floor(n/2).
struct Periodogram {
  std::vector<double> freqs_hz;
  std::vector<double> psd;
  double bin_hz = 0.0;
};

inline Periodogram periodogram_psd(const std::vector<double>& x, double fs) {
  if (!(fs > 0.0)) throw parameter_error("periodogram: fs must be positive");
  const std::size_t n = x.size();
  if (n == 0) throw insufficient_data_error("periodogram: empty input");
  auto spec = fft_real(x);
  const std::size_t half = n / 2;
  Periodogram out;
  out.bin_hz = fs / static_cast<double>(n);
  out.freqs_hz.resize(half + 1);
  out.psd.resize(half + 1);
  const double scale = 1.0 / (fs * static_cast<double>(n));
  for (std::size_t k = 0; k <= half; ++k) {
    out.freqs_hz[k] = static_cast<double>(k) * out.bin_hz;
    double p = std::norm(spec[k]) * scale;
    const bool interior = k != 0 && !(n % 2 == 0 && k == half);
    if (interior) p *= 2.0;  // fold the negative-frequency half
    out.psd[k] = p;
  }
  return out;
}

// Analytic signal via the frequency-domain Hilbert method: zero the negative
// frequencies and double the positive ones (DC and Nyquist kept once).
inline std::vector<cplx> analytic_signal(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  auto spec = fft_real(x);
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < n; ++k) {
    const bool nyquist = (n % 2 == 0 && k == half);
    if (k < half || (k == half && !nyquist)) {
      spec[k] *= 2.0;
    } else if (!nyquist && k > half) {
      spec[k] = cplx(0, 0);
    }
  }
  fft(spec, true);
  return spec;
}

}  // namespace erudite::dsp
