#pragma once

namespace bellmux {

/// Integer half-width (in pixels) of the coincidence window whose total
/// width 2m+1 px best matches 2 n_sigma standard deviations.
int window_halfwidth_px(double n_sigma, double sigma_k, double pitch);

/// Probability that a correlated pair with Gaussian difference (std
/// sigma_k) passes a +-m pixel difference cut after both positions are
/// pixelated, averaged over sub-pixel phase. One axis.
double axis_capture_pair(double sigma_k, double pitch, int m);

/// Same cut probability for the difference of two independent positions
/// uniform in a cell of width cell_w, one of them displaced by a Gaussian
/// of std sigma_k. One axis.
double axis_capture_samecell(double sigma_k, double cell_w, double pitch, int m);

/// Kernel width (in pixels) at which the discrete-window capture equals
/// the continuous binning factor for the given cut, i.e. the width that
/// makes pixelated coincidence counting reproduce
/// erf(n/sqrt(2))^2/(alpha n^2) exactly. One root exists per window
/// half-width; the one closest to hint_px is returned.
double solve_kernel_sigma_px(double pitch, double n_sigma, double hint_px = 2.65);

}  // namespace bellmux
