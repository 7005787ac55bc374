#pragma once
#include <vector>

namespace bellmux {

/// Discrete Gaussian kernel, truncated at +-4 sigma and renormalized.
/// sigma is in bin units; sigma <= 0 yields the identity kernel.
std::vector<double> gaussian_kernel(double sigma_bins);

/// Amplitude transfer of the kernel for a sinusoid of the given frequency
/// [cycles per bin].
double kernel_transfer(const std::vector<double>& kernel, double freq);

/// Separable smoothing of a row-major image with reflect padding.
void smooth_rows(std::vector<double>& img, int width, int height, const std::vector<double>& k);
void smooth_cols(std::vector<double>& img, int width, int height, const std::vector<double>& k);

}  // namespace bellmux
