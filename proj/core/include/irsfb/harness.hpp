// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte-Carlo runner. Every (sweep point, trial) pair draws its own
// geometry and channels from a seed derived from the master seed, the
// scenario name and the two indices, so rows never depend on the thread
// schedule or on which other sweep points are present. All models in a trial
// share the same channel realization.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irsfb/feedback.hpp"
#include "irsfb/system.hpp"

namespace irsfb {

/// One model evaluated in every trial. A phase resolution of 0 means
/// continuous phases and weights: nothing is quantized and no feedback time is
/// charged (payload_bits and tf_s are reported as 0).
struct ModelSpec {
    ModelKind kind = ModelKind::kBaseline;
    std::string tag;                   ///< CSV model column; derived when empty
    Shape sizes;                       ///< explicit factor sizes (empty: automatic)
    std::size_t order = 0;             ///< P for automatic sizes [N / 2^(P-1), 2, ..., 2]
    std::size_t rank = 1;              ///< PARAFAC R
    Shape ranks;                       ///< Tucker R_p
    std::vector<unsigned> phase_bits{3};  ///< one entry or one per factor
    unsigned weight_bits = 3;

    bool continuous() const { return phase_bits.size() == 1 && phase_bits[0] == 0; }
};

enum class SweepVariable { kNone, kRicianKdb, kIrsSize, kFeedbackBandwidth, kFeedbackPower, kResolution };

struct ExperimentConfig {
    std::string scenario = "custom";
    SweepVariable sweep = SweepVariable::kNone;
    std::vector<double> grid;
    std::vector<ModelSpec> models;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    std::size_t threads = 0;  ///< 0: hardware concurrency
    bool timing = false;      ///< fill elapsed_s; off keeps the CSV reproducible
    std::string output;

    SystemParams system;
    double k_db = 10.0;
    std::optional<std::size_t> n_h;  ///< IRS panel; default split when unset
    std::optional<std::size_t> n_v;
    std::optional<double> noise_var;  ///< rate noise; default B N_0 / p
    bool include_preamble = true;
    PayloadAccounting tucker_accounting = PayloadAccounting::kLiteral;
    std::size_t max_iterations = 500;
    double epsilon = 1e-6;

    /// Throws ConfigError describing the first problem found.
    void validate() const;
};

struct ResultRow {
    std::string scenario;
    std::string model;
    std::string sweep_name;
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    double rate_bpshz = 0.0;
    double se_bps = 0.0;
    double ee_bpj = 0.0;
    double tf_s = 0.0;
    std::uint64_t payload_bits = 0;
    double nmse = 0.0;
    double elapsed_s = 0.0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

std::string sweep_name(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

/// Parses `kind key=value ...`, e.g. "parafac sizes=64,4,4 rank=2 bits=3 wbits=3".
ModelSpec parse_model_spec(const std::string& text);
std::string default_tag(const ModelSpec& spec);

/// Built-in scenarios: fig5, fig6, fig7, fig8, fig9, fig10_12.
ExperimentConfig scenario_preset(const std::string& name);
std::vector<std::string> scenario_names();

/// Flat `key = value` text; `#` starts a comment. `preset = <name>` is applied
/// before every other key. Repeated `model` lines accumulate and replace the
/// preset's models. Throws ConfigError with the offending line number.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Concrete factor sizes of `spec` for an IRS of n elements.
Shape resolve_sizes(const ModelSpec& spec, std::size_t n);

/// Runs the whole grid. Rows are ordered by sweep point, then trial, then model.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{"scenario", "model",  "sweep_name",   "sweep_value",
                                               "seed",     "rate_bpshz", "se_bps",   "ee_bpj",
                                               "tf_s",     "payload_bits", "nmse",   "elapsed_s"};
    return cols;
}

/// %.17g-style text (17 significant digits), independent of the global locale.
std::string format_double(double v);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
/// Parses a file written by write_csv. Throws ConfigError on malformed input.
std::vector<ResultRow> read_csv(std::istream& in);

} // namespace irsfb
