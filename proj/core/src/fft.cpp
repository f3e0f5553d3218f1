#include "packetsim/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "packetsim/common.hpp"

namespace packetsim {

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

// The FFTW planner is not reentrant; plan creation is serialized and plans
// are kept for the life of the process. fftw_execute_dft on caller-owned
// buffers is thread-safe.
PlanPair plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair p;
  p.forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.inverse = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p.forward || !p.inverse) throw NumericalError("fftw plan creation failed");
  cache[n] = p;
  return p;
}

}  // namespace

void fft_forward(std::complex<double>* data, int n) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_for(n).forward, buf, buf);
}

void fft_inverse(std::complex<double>* data, int n) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plans_for(n).inverse, buf, buf);
  const double scale = 1.0 / static_cast<double>(n);
  for (int i = 0; i < n; ++i) data[i] *= scale;
}

}  // namespace packetsim
