#pragma once

#include <complex>
#include <vector>

namespace semilab::quantization {

using cplx = std::complex<double>;

/// Unnormalized in-place complex DFT over a row-major array of the given shape
/// (1-D or 2-D). Plans are cached process-wide; execution is thread-safe.
class Fft {
 public:
  explicit Fft(std::vector<int> shape);
  void forward(cplx* data) const;   ///< Σ x_n e^{-2πi kn/N}
  void backward(cplx* data) const;  ///< Σ x_k e^{+2πi kn/N}
  std::size_t size() const { return size_; }

 private:
  std::vector<int> shape_;
  std::size_t size_ = 0;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace semilab::quantization
