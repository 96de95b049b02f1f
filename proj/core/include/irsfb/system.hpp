// SPDX-License-Identifier: Apache-2.0
//
// Link-level metrics: beamformer design, achievable rate, feedback duration,
// spectral efficiency and energy efficiency.
//
// Frame model: T = T_PD + T_F with T_E = (M_T N + 1) T_0 taking the pilot
// share of T_PD. Bandwidth and power are split between data and feedback as
// B = B_max - B_F and p = P_max - p_F. All logarithms are base 2.
#pragma once

#include <optional>

#include "irsfb/channel.hpp"
#include "irsfb/feedback.hpp"
#include "irsfb/reconstruction.hpp"

namespace irsfb {

double db_to_linear(double db);
double linear_to_db(double x);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

struct SystemParams {
    std::size_t n = 1024;
    std::size_t m_t = 16;
    std::size_t m_r = 16;
    double b_max_hz = 100e6;
    double b_f_hz = 200e3;
    double p_max_w = dbm_to_watts(45.0);
    double p_f_w = dbm_to_watts(-10.0);
    double p_c0_w = dbm_to_watts(45.0);
    double p_cn_w = dbm_to_watts(10.0);
    double n0_w_per_hz = dbm_to_watts(-174.0);
    double pathloss_db = 110.0;  ///< alpha_H = alpha_G = beta_F = 10^(-pathloss_db/10)
    double mu = 1.0;
    double mu_f = 1.0;
    double t0_s = 0.8e-6;
    double p0_w = 0.8e-3;
    double pilot_fraction = 0.3;  ///< share of T_PD used by T_E; data gets the rest

    double data_bandwidth_hz() const { return b_max_hz - b_f_hz; }
    double data_power_w() const { return p_max_w - p_f_w; }
    double pathloss_linear() const { return db_to_linear(-pathloss_db); }
    double static_power_w() const { return p_c0_w + static_cast<double>(n) * p_cn_w; }
    /// Receiver noise power B N_0 / p_TX, which makes the rate and the
    /// spectral-efficiency log term identical.
    double normalized_noise() const { return data_bandwidth_hz() * n0_w_per_hz / data_power_w(); }

    /// Throws ConfigError when a value is out of range.
    void validate() const;
};

struct Beamformers {
    CVector w;  ///< combiner, unit norm, length M_R
    CVector q;  ///< precoder, unit norm, length M_T
    PhaseShiftVector s_opt;
};

/// w and q are the dominant singular vectors of G (left) and H (right).
/// s_opt cancels the phase of conj(v_G[n]) u_H[n] so every IRS path adds
/// coherently. Throws NumericalError on an all-zero channel.
Beamformers design_beamformers(const ChannelRealization& ch);

/// w^H G diag(s) H q.
Complex cascaded_gain(const ChannelRealization& ch, std::span<const Complex> w, std::span<const Complex> q,
                      std::span<const Complex> s);

/// log2(1 + |w^H G diag(s) H q|^2 / noise_var).
double achievable_rate(const ChannelRealization& ch, std::span<const Complex> w, std::span<const Complex> q,
                       std::span<const Complex> s, double noise_var);

/// B_F log2(1 + p_F |g_F|^2 / (B_F N_0)) in bits/s. Throws NumericalError
/// when the capacity is zero or not finite.
double feedback_capacity_bps(const SystemParams& params, Complex g_f);

struct FeedbackDuration {
    double seconds = 0.0;
    std::uint64_t payload_bits = 0;
};

/// N b_F over the control-link capacity; the preamble is not counted.
FeedbackDuration feedback_duration_baseline(const SystemParams& params, Complex g_f, const BaselineLayout& layout);
/// (T_PR + R sum N_p b_p + (R - 1) b_w) over the capacity.
FeedbackDuration feedback_duration_parafac(const SystemParams& params, Complex g_f, const ParafacLayout& layout,
                                           bool include_preamble = true);
/// (T_PR + sum R_p N_p b_p + core and weight terms) over the capacity.
FeedbackDuration feedback_duration_tucker(const SystemParams& params, Complex g_f, const TuckerLayout& layout,
                                          PayloadAccounting accounting = PayloadAccounting::kLiteral,
                                          bool include_preamble = true);

struct FrameTiming {
    double t_e = 0.0;  ///< channel estimation
    double t_f = 0.0;  ///< feedback
    double t = 0.0;    ///< whole frame
};

/// T_E = (M_T N + 1) T_0, T_PD = T_E / pilot_fraction, T = T_PD + T_F.
FrameTiming frame_timing(const SystemParams& params, double t_f);

/// log2(1 + p |c|^2 / (B N_0)) for the cascaded gain c.
double data_rate_bpshz(const SystemParams& params, double gain_squared);

/// (1 - (T_E + T_F)/T) B rate. Throws NumericalError if the overhead
/// exceeds the frame.
double spectral_efficiency(const SystemParams& params, double rate_bpshz, const FrameTiming& timing);

/// P_E + ((T - T_E - T_F)/T) mu p + mu_F p_F T_F / T + P_c, with
/// P_E = P_0 (1 + N M_T) T_0 and P_c = P_c0 + N P_cn.
double total_power(const SystemParams& params, const FrameTiming& timing);

/// SE / P_tot. Throws NumericalError on non-positive total power.
double energy_efficiency(const SystemParams& params, double se_bps, const FrameTiming& timing);

} // namespace irsfb
