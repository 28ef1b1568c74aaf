#pragma once

#include <complex>

namespace qcpgm::core {

inline constexpr int kFftForward = -1;   // exponent sign -1: F(k) = sum f(x) e^{-ikx}
inline constexpr int kFftBackward = +1;  // unnormalized inverse

/// In-place 2-D DFT over a row-major rows x cols complex array.
/// Unnormalized; a forward/backward round trip scales by rows*cols.
/// Thread-safe: plans are cached per shape behind a mutex, execution is
/// concurrent.
void fft2(std::complex<double>* data, int rows, int cols, int sign);

/// In-place 1-D DFT, same conventions as fft2.
void fft1(std::complex<double>* data, int n, int sign);

/// Smallest size >= n whose prime factors are all in {2, 3, 5, 7}; keeps the
/// zero-padded transforms fast.
int next_fast_fft_size(int n);

}  // namespace qcpgm::core
