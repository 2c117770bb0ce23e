#pragma once

// Thin FFTW wrapper. Plans are created once per length and shared; FFTW's
// planner is not thread-safe, so plan creation is serialized while
// execution on caller-owned arrays is lock-free.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

namespace scatter::detail {

class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  // Unnormalized transform with kernel exp(-2 pi i k n / N) (sign = -1) or
  // exp(+2 pi i k n / N) (sign = +1). in and out must not alias.
  void execute(int sign, const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
    fftw_plan plan = get(sign, n);
    // fftw_execute_dft does not modify `in` for out-of-place plans, but its
    // signature is non-const.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in));
    fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out));
  }

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int sign, std::size_t n) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(sign, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<std::complex<double>> a(n), b(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                      reinterpret_cast<fftw_complex*>(b.data()),
                                      sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mutex_;
  std::map<std::pair<int, std::size_t>, fftw_plan> plans_;
};

inline void fft_forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
  FftPlans::instance().execute(-1, in, out, n);
}

inline void fft_backward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
  FftPlans::instance().execute(+1, in, out, n);
}

}  // namespace scatter::detail
