#ifndef FLOORLINE_DENSITY_EVOLUTION_HPP
#define FLOORLINE_DENSITY_EVOLUTION_HPP

#include <vector>

namespace floorline {

enum class GainMode {
    IndependentDraws,  // E[tanh(m/2)]^(dc-2) over the variable->check density
    MeanField          // tanh(mean/2)^(dc-2)
};

struct DensityModel {
    double tau = 0;
    int points = 0;                        // grid size, odd, spacing 2 tau / (points-1)
    std::vector<double> grid;              // LLR values, grid[k] = -tau + k * delta
    std::vector<double> m_ext;             // [i] = mean of check->variable messages, [0] = 0
    std::vector<double> m_vc;              // [i] = mean of variable->check inputs to iteration i
    std::vector<double> gain;              // [i] = g_i, gain[0] = 1
    std::vector<double> cv_density;        // final check->variable density
    std::vector<double> vc_density;        // final variable->check density
};

// Quantized density evolution for the regular (dv, dc) ensemble on BPSK-AWGN
// under all-zero transmission. Messages live on a uniform grid over
// [-tau, tau]; clipping folds out-of-range mass onto the endpoints. The check
// step is the pairwise tanh-rule reduction applied dc-2 times.
DensityModel evolve(int dv, int dc, double sigma2, double tau, int bins, int iters,
                    GainMode mode = GainMode::IndependentDraws);

// Eq.-style gain from an explicit density on a grid (independence reading).
double gain_factor(int dc, const std::vector<double>& density, const std::vector<double>& grid);

double gain_factor_meanfield(int dc, double mean);

} // namespace floorline

#endif
