#ifndef SLOPEGYRE_FFT_INTERNAL_HPP
#define SLOPEGYRE_FFT_INTERNAL_HPP

#include <vector>

#include "slopegyre/poly.hpp"

namespace slopegyre::fft {

// In-place unnormalized DFTs (FFTW sign convention: forward = e^{-i...}).
void forward(std::vector<cplx>& buf);
void backward(std::vector<cplx>& buf);

} // namespace slopegyre::fft

#endif
