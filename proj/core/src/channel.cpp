// SPDX-License-Identifier: Apache-2.0
#include "irsfb/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "irsfb/errors.hpp"

namespace irsfb {

namespace {

CVector progression(std::size_t count, double phase_step) {
    CVector v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = std::polar(1.0, static_cast<double>(i) * phase_step);
    return v;
}

// (LOS, NLOS) amplitude prefactors of the Rician mixture.
std::pair<double, double> rician_weights(double k, double alpha) {
    if (std::isinf(k)) return {std::sqrt(alpha), 0.0};
    return {std::sqrt(alpha * k / (k + 1.0)), std::sqrt(alpha / (k + 1.0))};
}

void validate(const ChannelParams& p, const GeometrySample& geo) {
    if (p.n == 0 || p.m_t == 0 || p.m_r == 0) throw ConfigError("channel dimensions must be positive");
    if (std::isnan(p.k_h) || std::isnan(p.k_g) || p.k_h < 0.0 || p.k_g < 0.0)
        throw ConfigError("Rician factors must be non-negative");
    if (!(p.alpha_h >= 0.0) || !(p.alpha_g >= 0.0) || !(p.beta_f >= 0.0) || std::isinf(p.alpha_h) ||
        std::isinf(p.alpha_g) || std::isinf(p.beta_f))
        throw ConfigError("path-loss gains must be finite and non-negative");
    if (geo.n_h * geo.n_v != p.n) {
        throw ConfigError("IRS panel " + std::to_string(geo.n_h) + "x" + std::to_string(geo.n_v) +
                          " does not match N = " + std::to_string(p.n));
    }
}

} // namespace

CVector ula_steering(std::size_t m, double theta) {
    return progression(m, std::numbers::pi * std::sin(theta));
}

CVector upa_steering(std::size_t n_h, std::size_t n_v, double psi, double phi) {
    const CVector h = progression(n_h, std::numbers::pi * std::sin(psi) * std::cos(phi));
    const CVector v = progression(n_v, std::numbers::pi * std::cos(phi));
    return kronecker(v, h);
}

PanelSplit default_panel_split(std::size_t n) {
    if (n == 0) throw ConfigError("IRS size must be positive");
    std::size_t n_v = 1;
    for (std::size_t d = 1; d * d <= n; ++d)
        if (n % d == 0) n_v = d;
    return {n / n_v, n_v};
}

GeometrySample sample_geometry(Rng& rng, PanelSplit panel) {
    std::uniform_real_distribution<double> full(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> elevation(0.0, std::numbers::pi / 2.0);
    GeometrySample g;
    g.theta_tx = full(rng);
    g.theta_rx = full(rng);
    g.psi_aoa = full(rng);
    g.psi_aod = full(rng);
    g.phi_aoa = elevation(rng);
    g.phi_aod = elevation(rng);
    g.n_h = panel.n_h;
    g.n_v = panel.n_v;
    return g;
}

LosComponents los_components(const ChannelParams& params, const GeometrySample& geo) {
    validate(params, geo);
    const CVector a_tx = ula_steering(params.m_t, geo.theta_tx);
    const CVector b_rx = ula_steering(params.m_r, geo.theta_rx);
    const CVector b_irs = upa_steering(geo.n_h, geo.n_v, geo.psi_aoa, geo.phi_aoa);
    const CVector a_irs = upa_steering(geo.n_h, geo.n_v, geo.psi_aod, geo.phi_aod);
    return {ComplexMatrix::column(b_irs) * ComplexMatrix::column(a_tx).adjoint(),
            ComplexMatrix::column(b_rx) * ComplexMatrix::column(a_irs).adjoint()};
}

ChannelRealization sample_channels(const ChannelParams& params, const GeometrySample& geometry, Rng& rng) {
    const LosComponents los = los_components(params, geometry);
    const auto [h_los_w, h_nlos_w] = rician_weights(params.k_h, params.alpha_h);
    const auto [g_los_w, g_nlos_w] = rician_weights(params.k_g, params.alpha_g);

    ChannelRealization ch;
    ch.h = ComplexMatrix(params.n, params.m_t, complex_gaussian_vector(rng, params.n * params.m_t));
    ch.g = ComplexMatrix(params.m_r, params.n, complex_gaussian_vector(rng, params.m_r * params.n));
    ch.g_f = complex_gaussian(rng, params.beta_f);

    ch.h = Complex(h_los_w) * los.h_los + Complex(h_nlos_w) * ch.h;
    ch.g = Complex(g_los_w) * los.g_los + Complex(g_nlos_w) * ch.g;
    ch.k_h = params.k_h;
    ch.k_g = params.k_g;
    ch.alpha_h = params.alpha_h;
    ch.alpha_g = params.alpha_g;
    return ch;
}

ChannelRealization sample_channels(const ChannelParams& params, const GeometrySample& geometry,
                                   std::uint64_t seed) {
    Rng rng(seed);
    return sample_channels(params, geometry, rng);
}

} // namespace irsfb
