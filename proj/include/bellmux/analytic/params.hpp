#pragma once

namespace bellmux {

/// Source and detection parameters of the pair-generation process.
struct SourceParams {
  double chi = 0.01;     ///< pair generation probability per mode
  double eta_w = 0.08;   ///< write-out filtering + detection efficiency
  double eta_r0 = 0.405; ///< read-out (retrieval) efficiency at t = 0
  double eta_d = 1.0;    ///< read-arm detection efficiency after retrieval
  double alpha = 0.565;  ///< geometric mode-count factor

  void validate() const;
};

/// Read/write arm noise rates, per mode and before detection [1/shot].
/// Read noise rises from b_r0 toward b_r_inf with time constant tau_b and
/// carries a pair-probability proportional term b_r_chi * chi.
struct NoiseModel {
  double b_w = 0.0;
  double b_r0 = 0.0;
  double b_r_inf = 0.0;
  double b_r_chi = 0.0;
  double tau_b = 13.0;  ///< [us]

  void validate() const;
};

/// Thermal-motion decoherence: tau(k) = gamma / |k|, and the calibrated
/// temperature map T = temp_cal / gamma^2.
struct DecoherenceParams {
  double gamma = 6.26e3;      ///< [us rad/mm]
  double temp_cal = 1.841817e9;  ///< [uK (us rad/mm)^2]

  void validate() const;
};

}  // namespace bellmux
