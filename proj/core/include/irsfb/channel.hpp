// SPDX-License-Identifier: Apache-2.0
//
// Rician TX-IRS (H) and IRS-RX (G) channels with geometric line-of-sight
// parts, plus the scalar control channel g_F used for feedback.
//
//   H = sqrt(a_H K_H/(K_H+1)) b_IRS a_TX^H + sqrt(a_H/(K_H+1)) H_NLOS
//   G = sqrt(a_G K_G/(K_G+1)) b_RX a_IRS^H + sqrt(a_G/(K_G+1)) G_NLOS
//
// Path loss only enters through the prefactors above. NLOS entries are i.i.d.
// CN(0, 1) and g_F ~ CN(0, beta_F).
#pragma once

#include <cstdint>

#include "irsfb/random.hpp"
#include "irsfb/tensor.hpp"

namespace irsfb {

/// Half-wavelength ULA response: entry m is exp(j pi m sin(theta)), m = 0..M-1.
CVector ula_steering(std::size_t m, double theta);

/// Planar-array response b = b_v kron b_h (horizontal index fastest), with
/// horizontal phase pi n_h sin(psi) cos(phi) and vertical phase pi n_v cos(phi).
CVector upa_steering(std::size_t n_h, std::size_t n_v, double psi, double phi);

/// Default IRS panel split: N_v is the largest divisor of N not above sqrt(N).
struct PanelSplit {
    std::size_t n_h = 1;
    std::size_t n_v = 1;
};
PanelSplit default_panel_split(std::size_t n);

struct GeometrySample {
    double theta_tx = 0.0;  ///< TX departure angle, [-pi, pi]
    double theta_rx = 0.0;  ///< RX arrival angle, [-pi, pi]
    double psi_aoa = 0.0;   ///< IRS azimuth of arrival, [-pi, pi]
    double psi_aod = 0.0;   ///< IRS azimuth of departure, [-pi, pi]
    double phi_aoa = 0.0;   ///< IRS elevation of arrival, [0, pi/2]
    double phi_aod = 0.0;   ///< IRS elevation of departure, [0, pi/2]
    std::size_t n_h = 1;
    std::size_t n_v = 1;
};

/// Draws the six angles in the order they are declared above.
GeometrySample sample_geometry(Rng& rng, PanelSplit panel);

struct ChannelParams {
    std::size_t n = 1024;
    std::size_t m_t = 2;
    std::size_t m_r = 2;
    double k_h = 1.0;      ///< Rician factor, linear; may be +inf
    double k_g = 1.0;
    double alpha_h = 1.0;  ///< path-loss gain, linear
    double alpha_g = 1.0;
    double beta_f = 1.0;   ///< variance of g_F
};

struct ChannelRealization {
    ComplexMatrix h;  ///< N x M_T
    ComplexMatrix g;  ///< M_R x N
    Complex g_f;
    double k_h = 0.0;
    double k_g = 0.0;
    double alpha_h = 1.0;
    double alpha_g = 1.0;
};

struct LosComponents {
    ComplexMatrix h_los;  ///< b_IRS(arrival) a_TX^H
    ComplexMatrix g_los;  ///< b_RX a_IRS(departure)^H
};

LosComponents los_components(const ChannelParams& params, const GeometrySample& geometry);

/// Draws H_NLOS (column-major), then G_NLOS, then g_F from `rng`. Throws
/// ConfigError on negative K, alpha or beta_F, or a geometry that does not
/// match N.
ChannelRealization sample_channels(const ChannelParams& params, const GeometrySample& geometry, Rng& rng);
ChannelRealization sample_channels(const ChannelParams& params, const GeometrySample& geometry,
                                   std::uint64_t seed);

} // namespace irsfb
