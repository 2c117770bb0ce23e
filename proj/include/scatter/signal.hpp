#pragma once

// Periodic signals on the unit circle [0, 1), sampled at t_k = k / N, and
// their Fourier coefficients on the integer frequency grid.
//
// Normalization: the spectrum holds Fourier-series coefficients
//   c_w = (1/N) sum_k s_k exp(-2 pi i w k / N),
// so that energy(s) = (1/N) sum_k |s_k|^2 = sum_w |c_w|^2 with unit frequency
// spacing. Every frequency-domain integral in the library is a unit-weight
// sum over this grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "scatter/detail/fft.hpp"
#include "scatter/errors.hpp"

namespace scatter {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

constexpr bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

inline void require_grid_size(std::size_t n) {
  if (n < 2 || !is_power_of_two(n))
    throw InvalidArgument("sample count must be a power of two >= 2, got " + std::to_string(n));
}

/// Integer frequency of storage index k in the centered convention
/// {-N/2, ..., N/2 - 1}. Index N/2 is the Nyquist frequency -N/2.
constexpr int frequency_of(std::size_t k, std::size_t n) noexcept {
  return k < n / 2 ? static_cast<int>(k) : static_cast<int>(k) - static_cast<int>(n);
}

/// Storage index of integer frequency w, taken modulo N.
constexpr std::size_t index_of(int w, std::size_t n) noexcept {
  const auto m = static_cast<long long>(n);
  return static_cast<std::size_t>(((w % m) + m) % m);
}

/// Index of -w on the circle; the Nyquist bin and the zero bin are their own mirrors.
constexpr std::size_t mirror_index(std::size_t k, std::size_t n) noexcept { return (n - k) % n; }

class Signal {
 public:
  explicit Signal(std::vector<cplx> samples) : samples_(std::move(samples)), real_(false) {
    validate();
  }

  static Signal from_real(std::span<const double> values) {
    std::vector<cplx> s(values.begin(), values.end());
    Signal out(std::move(s));
    out.real_ = true;
    return out;
  }

  static Signal zeros(std::size_t n) {
    require_grid_size(n);
    return from_real(std::vector<double>(n, 0.0));
  }

  /// Sample the function g at t_k = k / N.
  template <typename F>
  static Signal sample(std::size_t n, F&& g) {
    require_grid_size(n);
    std::vector<cplx> s(n);
    bool real = true;
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = cplx(g(static_cast<double>(k) / static_cast<double>(n)));
      real = real && s[k].imag() == 0.0;
    }
    Signal out(std::move(s));
    out.real_ = real;
    return out;
  }

  std::size_t size() const noexcept { return samples_.size(); }
  bool is_real() const noexcept { return real_; }
  const std::vector<cplx>& samples() const noexcept { return samples_; }
  const cplx& operator[](std::size_t k) const { return samples_[k]; }
  static constexpr double domain_length() noexcept { return 1.0; }

  std::vector<double> real_part() const {
    std::vector<double> out(samples_.size());
    std::transform(samples_.begin(), samples_.end(), out.begin(), [](cplx z) { return z.real(); });
    return out;
  }

 private:
  void validate() const {
    require_grid_size(samples_.size());
    for (const auto& z : samples_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidArgument("signal samples must be finite");
  }

  std::vector<cplx> samples_;
  bool real_;
};

/// Fourier coefficients stored in FFT order: index k holds frequency
/// frequency_of(k, N). Use at(w) for frequency-based access.
class Spectrum {
 public:
  explicit Spectrum(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
    require_grid_size(coeffs_.size());
  }

  /// coeffs at integer frequency w equal g(w).
  template <typename F>
  static Spectrum from_function(std::size_t n, F&& g) {
    require_grid_size(n);
    std::vector<cplx> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = cplx(g(static_cast<double>(frequency_of(k, n))));
    return Spectrum(std::move(c));
  }

  std::size_t size() const noexcept { return coeffs_.size(); }
  const std::vector<cplx>& coeffs() const noexcept { return coeffs_; }
  const cplx& operator[](std::size_t k) const { return coeffs_[k]; }
  int frequency(std::size_t k) const noexcept { return frequency_of(k, coeffs_.size()); }
  const cplx& at(int w) const { return coeffs_[index_of(w, coeffs_.size())]; }

  Spectrum scaled(double factor) const {
    auto c = coeffs_;
    for (auto& z : c) z *= factor;
    return Spectrum(std::move(c));
  }

 private:
  std::vector<cplx> coeffs_;
};

inline Spectrum dft(const Signal& s) {
  const std::size_t n = s.size();
  std::vector<cplx> out(n);
  detail::fft_forward(s.samples().data(), out.data(), n);
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& z : out) z *= inv;
  return Spectrum(std::move(out));
}

inline Signal idft(const Spectrum& spectrum) {
  const std::size_t n = spectrum.size();
  std::vector<cplx> out(n);
  detail::fft_backward(spectrum.coeffs().data(), out.data(), n);
  return Signal(std::move(out));
}

/// Circular convolution realized as the pointwise product dft(s) * filter.
inline Signal convolve(const Signal& s, const Spectrum& filter) {
  if (filter.size() != s.size()) throw LengthMismatch(s.size(), filter.size());
  auto spec = dft(s).coeffs();
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= filter[k];
  return idft(Spectrum(std::move(spec)));
}

inline Signal modulus(const Signal& s) {
  std::vector<double> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = std::abs(s[k]);
  return Signal::from_real(out);
}

/// Mean square times the domain length: (1/N) sum |s_k|^2.
inline double energy(const Signal& s) {
  double acc = 0.0;
  for (const auto& z : s.samples()) acc += std::norm(z);
  return acc / static_cast<double>(s.size());
}

inline double spectral_energy(const Spectrum& c) {
  double acc = 0.0;
  for (const auto& z : c.coeffs()) acc += std::norm(z);
  return acc;
}

/// Fourier transform of the Gaussian chi_a: exp(-(w/a)^2).
inline double chi_hat(double a, double w) {
  const double u = w / a;
  return std::exp(-u * u);
}

inline Spectrum gaussian_lowpass(double a, std::size_t n) {
  if (!(a > 0.0)) throw InvalidArgument("gaussian_lowpass: width must be positive");
  return Spectrum::from_function(n, [a](double w) { return chi_hat(a, w); });
}

/// Circular shift: result_k = s_{k - m mod N}.
inline Signal shift(const Signal& s, long long m) {
  const auto n = static_cast<long long>(s.size());
  std::vector<cplx> out(s.size());
  for (long long k = 0; k < n; ++k) out[static_cast<std::size_t>((((k + m) % n) + n) % n)] = s[static_cast<std::size_t>(k)];
  if (s.is_real()) {
    std::vector<double> re(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) re[k] = out[k].real();
    return Signal::from_real(re);
  }
  return Signal(std::move(out));
}

inline Signal subtract(const Signal& a, const Signal& b) {
  if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size());
  std::vector<cplx> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return Signal(std::move(out));
}

/// Real signal with independent Gaussian Fourier coefficients on the
/// frequencies lo <= |w| <= hi (and, if with_mean, on w = 0), unit expected
/// energy per active frequency, Hermitian symmetric so the samples are real.
inline Signal random_bandlimited_real(std::size_t n, int lo, int hi, std::uint64_t seed,
                                      bool with_mean = false) {
  require_grid_size(n);
  const int nyq = static_cast<int>(n / 2);
  if (lo < 1 || hi >= nyq || lo > hi)
    throw InvalidArgument("random_bandlimited_real: band must satisfy 1 <= lo <= hi < N/2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<cplx> c(n, 0.0);
  if (with_mean) c[0] = gauss(rng);
  for (int w = lo; w <= hi; ++w) {
    const double re = gauss(rng), im = gauss(rng);
    const cplx z = cplx(re, im) / std::sqrt(2.0);
    c[index_of(w, n)] = z;
    c[index_of(-w, n)] = std::conj(z);
  }
  const auto s = idft(Spectrum(std::move(c)));
  return Signal::from_real(s.real_part());
}

}  // namespace scatter
