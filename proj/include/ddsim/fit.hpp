#pragma once

// Damped-cosine and exponential fits: FFT peak seed, then Levenberg-Marquardt.

#include <map>
#include <string>
#include <vector>

#include "ddsim/device.hpp"

namespace ddsim {

struct DampedCosineFit {
    double amplitude = 0.0;
    double decay = 0.0;   // 1/ns
    double omega = 0.0;   // rad/ns
    double phase = 0.0;
    double offset = 0.0;
    std::map<std::string, double> sigma;  // one standard error per parameter
    int evaluations = 0;
};

struct FitOptions {
    int max_evaluations = 200;
    double xtol = 1e-10;
    double min_periods = 1.5;
    double peak_to_floor = 4.0;  // spectral peak / median power
};

// y ~ A exp(-G t) cos(W t + phi) + c.
DampedCosineFit fit_damped_cosine(const std::vector<double>& t, const std::vector<double>& y,
                                  const FitOptions& opt = {});

struct FitResult {
    double J_estimate = 0.0;
    double decay_rate = 0.0;
    double omega = 0.0;
    std::map<std::string, double> uncertainty;
    std::string method;
};

// J = W/2 in the plus frame, W/4 in the zero frame.
FitResult extract_crosstalk(const std::vector<double>& t, const std::vector<double>& y, Frame frame,
                            const FitOptions& opt = {});

struct ExponentialFit {
    double amplitude = 0.0;
    double rate = 0.0;
    double offset = 0.0;
    double sigma_amplitude = 0.0, sigma_rate = 0.0, sigma_offset = 0.0;
};

// y ~ A exp(-G t) + B. Flat data returns G = 0 with zero uncertainty.
ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y,
                               const FitOptions& opt = {});

}  // namespace ddsim
