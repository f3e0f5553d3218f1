#pragma once

#include <Eigen/Dense>
#include <complex>

namespace packetsim {

// In-place transforms on contiguous data. Plans are cached per length and
// reused; execution is safe from multiple threads.
void fft_forward(std::complex<double>* data, int n);
void fft_inverse(std::complex<double>* data, int n);  // includes the 1/n factor

inline void fft_forward(Eigen::VectorXcd& v) {
  fft_forward(v.data(), static_cast<int>(v.size()));
}
inline void fft_inverse(Eigen::VectorXcd& v) {
  fft_inverse(v.data(), static_cast<int>(v.size()));
}

}  // namespace packetsim
