#pragma once
#include "rfflow/density.hpp"

namespace rfflow {

// gamma_t(omega) = (1 - exp(-t(omega+delta)))/(omega+delta); truncated series
// near the removable singularity.
double time_kernel(double omega, double t, double delta);

// Result-1 integrals; measures must belong to the same config.
double g_bar(double t, const SpectralMeasure1D& rhoK, const ModelConfig& cfg);
double l_bar(double t, const SpectralMeasure1D& rhoL0, const SpectralMeasure1D& rhoV,
             const ModelConfig& cfg);
double h_bar(double t, const SpectralMeasure2D& rhoH0, const SpectralMeasure2D& rhoW,
             const ModelConfig& cfg);

struct ErrorCurve {
    std::vector<double> times;
    std::vector<double> test;
    std::vector<double> train;
    std::vector<double> g, h, l;  // per-time components
};

// Assembles both error curves.  For t*delta > 60 every exponential kernel is
// below e^-60 and the assembly returns the exact infinite-time algebra from
// the negative-axis branch instead of quadrature.
ErrorCurve error_curves(const std::vector<double>& times, const MeasureSet& ms);
ErrorCurve test_error(const std::vector<double>& times, const ModelConfig& cfg,
                      const MeasureSet& ms);
ErrorCurve train_error(const std::vector<double>& times, const ModelConfig& cfg,
                       const MeasureSet& ms);

struct LimitErrors {
    double test_inf = 0.0;
    double train_inf = 0.0;
    double dV = 0.0;     // dV/dx at -delta (implicit differentiation)
    double dV_fd = 0.0;  // finite-difference cross-check
    double V_at = 0.0;   // V(-delta)
    double K_at = 0.0;   // K(-delta)
    double W_at = 0.0;   // W(-delta,-delta)
};

// Result-2 infinite-time limits; requires delta > 0.
LimitErrors limit_errors(const ModelConfig& cfg);

void write_curve_csv(const ErrorCurve& c, const std::string& path, bool components = true);

}  // namespace rfflow
