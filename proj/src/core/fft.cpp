#include "qcpgm/core/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace qcpgm::core {

namespace {

// fftw_execute_dft is thread-safe on distinct buffers; plan creation is not,
// so plans are built once per (rows, cols, sign) under a lock.
// FFTW_UNALIGNED lets the cached plan run on any caller buffer.
std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan plan_for(int rows, int cols, int sign, fftw_complex* buf) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_tuple(rows, cols, sign);
  auto it = plan_cache.find(key);
  if (it != plan_cache.end()) return it->second;
  fftw_plan plan;
  int dir = sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD;
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (rows == 1) {
    plan = fftw_plan_dft_1d(cols, buf, buf, dir, flags);
  } else {
    plan = fftw_plan_dft_2d(rows, cols, buf, buf, dir, flags);
  }
  if (!plan) throw std::runtime_error("fft: plan creation failed");
  plan_cache.emplace(key, plan);
  return plan;
}

}  // namespace

void fft2(std::complex<double>* data, int rows, int cols, int sign) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("fft2: dimensions must be positive");
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_plan plan = plan_for(rows, cols, sign, buf);
  fftw_execute_dft(plan, buf, buf);
}

void fft1(std::complex<double>* data, int n, int sign) { fft2(data, 1, n, sign); }

int next_fast_fft_size(int n) {
  if (n < 1) return 1;
  for (int candidate = n;; ++candidate) {
    int m = candidate;
    for (int p : {2, 3, 5, 7}) {
      while (m % p == 0) m /= p;
    }
    if (m == 1) return candidate;
  }
}

}  // namespace qcpgm::core
