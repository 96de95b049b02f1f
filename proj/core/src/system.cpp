// SPDX-License-Identifier: Apache-2.0
#include "irsfb/system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "irsfb/errors.hpp"
#include "irsfb/linalg.hpp"

namespace irsfb {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive and finite");
}

FeedbackDuration over_capacity(const SystemParams& params, Complex g_f, std::uint64_t bits) {
    return {static_cast<double>(bits) / feedback_capacity_bps(params, g_f), bits};
}

} // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double x) { return 10.0 * std::log10(x); }
double dbm_to_watts(double dbm) { return db_to_linear(dbm - 30.0); }
double watts_to_dbm(double watts) { return linear_to_db(watts) + 30.0; }

void SystemParams::validate() const {
    if (n == 0 || m_t == 0 || m_r == 0) throw ConfigError("N, M_T and M_R must be positive");
    require_positive(b_max_hz, "B_max");
    require_positive(b_f_hz, "B_F");
    require_positive(data_bandwidth_hz(), "B_max - B_F");
    require_positive(p_max_w, "P_max");
    require_positive(p_f_w, "p_F");
    require_positive(data_power_w(), "P_max - p_F");
    require_positive(n0_w_per_hz, "N_0");
    require_positive(t0_s, "T_0");
    if (!(p_c0_w >= 0.0) || !(p_cn_w >= 0.0) || !(p0_w >= 0.0)) throw ConfigError("static powers must be non-negative");
    if (!(mu > 0.0) || !(mu_f > 0.0)) throw ConfigError("amplifier factors must be positive");
    if (!(pilot_fraction > 0.0 && pilot_fraction < 1.0)) throw ConfigError("pilot fraction must lie in (0, 1)");
    if (!std::isfinite(pathloss_db)) throw ConfigError("path loss must be finite");
}

Beamformers design_beamformers(const ChannelRealization& ch) {
    if (ch.g.rows() == 0 || ch.h.cols() == 0 || ch.g.cols() != ch.h.rows())
        throw DimensionError("design_beamformers: G and H dimensions do not chain");
    const SingularTriplet g = dominant_singular_vectors(ch.g);
    const SingularTriplet h = dominant_singular_vectors(ch.h);
    if (!(g.sigma > 0.0) || !(h.sigma > 0.0)) throw NumericalError("design_beamformers: zero channel");

    CVector s(ch.g.cols());
    for (std::size_t n = 0; n < s.size(); ++n) s[n] = std::conj(g.v[n]) * h.u[n];
    Beamformers out{g.u, h.v, {}};
    out.s_opt = project_unit_modulus(s);
    for (auto& z : out.s_opt.entries) z = std::conj(z);
    return out;
}

Complex cascaded_gain(const ChannelRealization& ch, std::span<const Complex> w, std::span<const Complex> q,
                      std::span<const Complex> s) {
    if (w.size() != ch.g.rows() || q.size() != ch.h.cols() || s.size() != ch.h.rows() || ch.g.cols() != ch.h.rows())
        throw DimensionError("cascaded_gain: vector sizes do not match the channels");
    const CVector hq = ch.h * q;
    Complex acc{};
    for (std::size_t n = 0; n < s.size(); ++n) {
        Complex gw{};  // (G^H w)_n conjugated, i.e. w^H G[:, n]
        for (std::size_t m = 0; m < w.size(); ++m) gw += std::conj(w[m]) * ch.g(m, n);
        acc += gw * s[n] * hq[n];
    }
    return acc;
}

double achievable_rate(const ChannelRealization& ch, std::span<const Complex> w, std::span<const Complex> q,
                       std::span<const Complex> s, double noise_var) {
    if (!(noise_var > 0.0)) throw ConfigError("noise variance must be positive");
    return std::log2(1.0 + std::norm(cascaded_gain(ch, w, q, s)) / noise_var);
}

double feedback_capacity_bps(const SystemParams& params, Complex g_f) {
    const double snr = params.p_f_w * std::norm(g_f) / (params.b_f_hz * params.n0_w_per_hz);
    const double c = params.b_f_hz * std::log2(1.0 + snr);
    if (!(c > 0.0) || !std::isfinite(c)) throw NumericalError("feedback link has zero capacity");
    return c;
}

FeedbackDuration feedback_duration_baseline(const SystemParams& params, Complex g_f, const BaselineLayout& layout) {
    return over_capacity(params, g_f, payload_bits(layout).body_bits);
}

FeedbackDuration feedback_duration_parafac(const SystemParams& params, Complex g_f, const ParafacLayout& layout,
                                           bool include_preamble) {
    return over_capacity(params, g_f, payload_bits(layout).total(include_preamble));
}

FeedbackDuration feedback_duration_tucker(const SystemParams& params, Complex g_f, const TuckerLayout& layout,
                                          PayloadAccounting accounting, bool include_preamble) {
    return over_capacity(params, g_f, payload_bits(layout, accounting).total(include_preamble));
}

FrameTiming frame_timing(const SystemParams& params, double t_f) {
    if (!(t_f >= 0.0) || !std::isfinite(t_f)) throw NumericalError("feedback duration must be finite and >= 0");
    const double t_e = static_cast<double>(params.m_t * params.n + 1) * params.t0_s;
    return {t_e, t_f, t_e / params.pilot_fraction + t_f};
}

double data_rate_bpshz(const SystemParams& params, double gain_squared) {
    return std::log2(1.0 + params.data_power_w() * gain_squared / (params.data_bandwidth_hz() * params.n0_w_per_hz));
}

double spectral_efficiency(const SystemParams& params, double rate_bpshz, const FrameTiming& timing) {
    if (!(timing.t > 0.0)) throw NumericalError("frame duration must be positive");
    const double overhead = (timing.t_e + timing.t_f) / timing.t;
    if (overhead > 1.0 + 1e-12) throw NumericalError("training and feedback exceed the frame");
    return std::max(0.0, 1.0 - overhead) * params.data_bandwidth_hz() * rate_bpshz;
}

double total_power(const SystemParams& params, const FrameTiming& timing) {
    if (!(timing.t > 0.0)) throw NumericalError("frame duration must be positive");
    const double p_e = params.p0_w * (1.0 + static_cast<double>(params.n * params.m_t)) * params.t0_s;
    return p_e + (timing.t - timing.t_e - timing.t_f) / timing.t * params.mu * params.data_power_w() +
           params.mu_f * params.p_f_w * timing.t_f / timing.t + params.static_power_w();
}

double energy_efficiency(const SystemParams& params, double se_bps, const FrameTiming& timing) {
    const double p = total_power(params, timing);
    if (!(p > 0.0)) throw NumericalError("total power must be positive");
    return se_bps / p;
}

} // namespace irsfb
