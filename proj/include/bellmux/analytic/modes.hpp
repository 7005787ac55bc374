#pragma once
#include "bellmux/analytic/params.hpp"
#include "bellmux/core/kernel.hpp"

namespace bellmux {

/// Schmidt mode-pair count M = alpha * A / (4 sigma_x sigma_y) for an
/// observed area A [rad/mm]^2.
double mode_count(double area, const CorrelationKernel& kernel, double alpha);

/// Birthday-collision probability that k photons placed uniformly on n_px
/// pixels share at least one pixel: 1 - prod_{i<k} (1 - i/n_px).
double collision_probability(int n_px, int k_photons);

/// Probability that a read-out photon from one of the other M-1 modes
/// lands within a 3 sigma radius of a given mode:
/// 1 - [1 - chi eta_r eta_w pi (3 sigma)^2 / n_px]^(M-1).
/// sigma_px is the mode size in pixels.
double crosstalk_probability(const SourceParams& src, double sigma_px, int n_px, int modes);

/// Probability of at least one detected pair across M modes,
/// 1 - (1 - eta chi)^M.
double success_probability(double eta, double chi, int modes);

}  // namespace bellmux
