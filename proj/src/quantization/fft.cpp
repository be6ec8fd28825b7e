#include "semilab/quantization/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace semilab::quantization {

namespace {

// FFTW's planner is not reentrant; plans are created once per (shape, sign) and
// executed through the thread-safe new-array interface.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan cached_plan(const std::vector<int>& shape, int sign) {
  static std::map<std::pair<std::vector<int>, int>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  const auto key = std::make_pair(shape, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  fftw_complex* scratch = fftw_alloc_complex(n);
  fftw_plan plan = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), scratch, scratch, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (!plan) throw std::runtime_error("FFTW failed to create a plan");
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

Fft::Fft(std::vector<int> shape) : shape_(std::move(shape)) {
  if (shape_.empty() || shape_.size() > 2) throw std::invalid_argument("Fft: only 1-D and 2-D transforms");
  size_ = 1;
  for (int s : shape_) {
    if (s <= 0) throw std::invalid_argument("Fft: nonpositive extent");
    size_ *= static_cast<std::size_t>(s);
  }
  forward_plan_ = cached_plan(shape_, FFTW_FORWARD);
  backward_plan_ = cached_plan(shape_, FFTW_BACKWARD);
}

void Fft::forward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void Fft::backward(cplx* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), p, p);
}

}  // namespace semilab::quantization
