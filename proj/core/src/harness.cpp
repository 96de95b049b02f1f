// SPDX-License-Identifier: Apache-2.0
#include "irsfb/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <locale>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "irsfb/decomposition.hpp"
#include "irsfb/errors.hpp"
#include "irsfb/random.hpp"

namespace irsfb {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto t = trim(s);
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (t.empty() || ec != std::errc() || ptr != last) throw ConfigError(what + ": expected a number, got '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s, const std::string& what) {
    std::uint64_t v = 0;
    const auto t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(what + ": expected a non-negative integer, got '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
    const auto t = trim(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(what + ": expected true or false, got '" + s + "'");
}

Shape parse_shape(const std::string& s, const std::string& what) {
    Shape out;
    for (const auto& part : split(s, ',')) out.push_back(static_cast<std::size_t>(parse_uint(part, what)));
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

std::vector<unsigned> parse_bits(const std::string& s, const std::string& what) {
    std::vector<unsigned> out;
    for (auto v : parse_shape(s, what)) {
        if (v > kMaxCodebookBits) throw ConfigError(what + ": resolution above 16 bits");
        out.push_back(static_cast<unsigned>(v));
    }
    return out;
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_double(part, "grid"));
    return out;
}

std::string join(const Shape& v, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + std::to_string(v[i]);
    return out;
}

std::string join_bits(const std::vector<unsigned>& v) {
    return join(Shape(v.begin(), v.end()), "-");
}

ModelSpec parafac_spec(Shape sizes, std::size_t rank, unsigned bits, std::size_t order = 0) {
    ModelSpec m;
    m.kind = ModelKind::kParafac;
    m.sizes = std::move(sizes);
    m.order = order;
    m.rank = rank;
    m.phase_bits = {bits};
    m.weight_bits = bits == 0 ? 3 : bits;
    m.tag = default_tag(m);
    return m;
}

ModelSpec tucker_spec(Shape sizes, Shape ranks, unsigned bits) {
    ModelSpec m;
    m.kind = ModelKind::kTucker;
    m.sizes = std::move(sizes);
    m.ranks = std::move(ranks);
    m.phase_bits = {bits};
    m.weight_bits = bits == 0 ? 3 : bits;
    m.tag = default_tag(m);
    return m;
}

ModelSpec baseline_spec(unsigned bits) {
    ModelSpec m;
    m.kind = ModelKind::kBaseline;
    m.phase_bits = {bits};
    m.tag = default_tag(m);
    return m;
}

ModelSpec with_bits(ModelSpec m, std::vector<unsigned> bits) {
    m.phase_bits = std::move(bits);
    m.tag = default_tag(m);
    return m;
}

// Configuration with the parameters used for the rate-versus-K experiments:
// unit path loss and unit receiver noise.
ExperimentConfig rate_scenario(const std::string& name) {
    ExperimentConfig c;
    c.scenario = name;
    c.sweep = SweepVariable::kRicianKdb;
    c.grid = {-10, -5, 0, 5, 10, 15};
    c.system.m_t = c.system.m_r = 2;
    c.system.pathloss_db = 0.0;
    c.noise_var = 1.0;
    return c;
}

ExperimentConfig link_scenario(const std::string& name) {
    ExperimentConfig c;
    c.scenario = name;
    c.k_db = 10.0;
    c.system.n = 1024;
    c.models = {baseline_spec(3), parafac_spec({512, 2}, 1, 3), parafac_spec({256, 2, 2}, 1, 3),
                parafac_spec(Shape(10, 2), 1, 3)};
    return c;
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
    auto& s = c.system;
    if (key == "scenario") c.scenario = value;
    else if (key == "sweep") c.sweep = parse_sweep_variable(value);
    else if (key == "grid") c.grid = parse_grid(value);
    else if (key == "trials") c.trials = parse_uint(value, key);
    else if (key == "seed") c.seed = parse_uint(value, key);
    else if (key == "threads") c.threads = parse_uint(value, key);
    else if (key == "timing") c.timing = parse_bool(value, key);
    else if (key == "output") c.output = value;
    else if (key == "k_db") c.k_db = parse_double(value, key);
    else if (key == "n") s.n = parse_uint(value, key);
    else if (key == "m") s.m_t = s.m_r = parse_uint(value, key);
    else if (key == "m_t") s.m_t = parse_uint(value, key);
    else if (key == "m_r") s.m_r = parse_uint(value, key);
    else if (key == "n_h") c.n_h = parse_uint(value, key);
    else if (key == "n_v") c.n_v = parse_uint(value, key);
    else if (key == "b_max_hz") s.b_max_hz = parse_double(value, key);
    else if (key == "b_f_hz") s.b_f_hz = parse_double(value, key);
    else if (key == "p_max_dbm") s.p_max_w = dbm_to_watts(parse_double(value, key));
    else if (key == "p_f_dbm") s.p_f_w = dbm_to_watts(parse_double(value, key));
    else if (key == "p_c0_dbm") s.p_c0_w = dbm_to_watts(parse_double(value, key));
    else if (key == "p_cn_dbm") s.p_cn_w = dbm_to_watts(parse_double(value, key));
    else if (key == "n0_dbm_hz") s.n0_w_per_hz = dbm_to_watts(parse_double(value, key));
    else if (key == "pathloss_db") s.pathloss_db = parse_double(value, key);
    else if (key == "mu") s.mu = parse_double(value, key);
    else if (key == "mu_f") s.mu_f = parse_double(value, key);
    else if (key == "t0_s") s.t0_s = parse_double(value, key);
    else if (key == "p0_w") s.p0_w = parse_double(value, key);
    else if (key == "pilot_fraction") s.pilot_fraction = parse_double(value, key);
    else if (key == "noise_var") {
        if (value == "auto") c.noise_var.reset();
        else c.noise_var = parse_double(value, key);
    } else if (key == "include_preamble") c.include_preamble = parse_bool(value, key);
    else if (key == "tucker_accounting") {
        if (value == "literal") c.tucker_accounting = PayloadAccounting::kLiteral;
        else if (value == "codec") c.tucker_accounting = PayloadAccounting::kCodec;
        else throw ConfigError("tucker_accounting must be literal or codec, got '" + value + "'");
    } else if (key == "max_iterations") c.max_iterations = parse_uint(value, key);
    else if (key == "epsilon") c.epsilon = parse_double(value, key);
    else throw ConfigError("unknown key '" + key + "'");
}

struct SweepPoint {
    ExperimentConfig cfg;
    double value = 0.0;
};

SweepPoint apply_sweep(const ExperimentConfig& base, double v) {
    SweepPoint pt{base, v};
    auto& c = pt.cfg;
    switch (base.sweep) {
    case SweepVariable::kNone: break;
    case SweepVariable::kRicianKdb: c.k_db = v; break;
    case SweepVariable::kIrsSize:
        c.system.n = static_cast<std::size_t>(std::llround(v));
        c.n_h.reset();
        c.n_v.reset();
        break;
    case SweepVariable::kFeedbackBandwidth: c.system.b_f_hz = v; break;
    case SweepVariable::kFeedbackPower: c.system.p_f_w = dbm_to_watts(v); break;
    case SweepVariable::kResolution:
        // The model tags keep their configured names so series stay grouped.
        for (auto& m : c.models) m.phase_bits = {static_cast<unsigned>(std::llround(v))};
        break;
    }
    return pt;
}

PanelSplit panel_of(const ExperimentConfig& c) {
    if (c.n_h && c.n_v) return {*c.n_h, *c.n_v};
    if (c.n_h) return {*c.n_h, c.system.n / *c.n_h};
    if (c.n_v) return {c.system.n / *c.n_v, *c.n_v};
    return default_panel_split(c.system.n);
}

ChannelParams channel_params(const ExperimentConfig& c) {
    ChannelParams p;
    p.n = c.system.n;
    p.m_t = c.system.m_t;
    p.m_r = c.system.m_r;
    p.k_h = p.k_g = db_to_linear(c.k_db);
    p.alpha_h = p.alpha_g = p.beta_f = c.system.pathloss_linear();
    return p;
}

std::vector<unsigned> expand(const std::vector<unsigned>& bits, std::size_t order) {
    if (bits.size() == 1) return std::vector<unsigned>(order, bits[0]);
    return bits;
}

struct ModelOutcome {
    PhaseShiftVector s;
    std::uint64_t payload_bits = 0;
    double tf_s = 0.0;
    double nmse = 0.0;
};

ModelOutcome evaluate_model(const ExperimentConfig& c, const ModelSpec& spec, const ChannelRealization& ch,
                            const Beamformers& bf, std::uint64_t fit_seed) {
    ModelOutcome out;
    const bool cont = spec.continuous();
    const auto& s_opt = bf.s_opt.entries;
    if (spec.kind == ModelKind::kBaseline) {
        if (cont) {
            out.s = bf.s_opt;
            return out;
        }
        const auto q = quantize_baseline(s_opt, spec.phase_bits[0]);
        const auto duration = feedback_duration_baseline(c.system, ch.g_f, layout_of(q));
        out.s = reconstruct(decode_feedback(encode_feedback(q)));
        out.payload_bits = duration.payload_bits;
        out.tf_s = duration.seconds;
        return out;
    }

    const Shape sizes = resolve_sizes(spec, c.system.n);
    const DenseTensor t = tensorize(s_opt, sizes);
    if (spec.kind == ModelKind::kParafac) {
        AlsOptions opt;
        opt.rank = spec.rank;
        opt.max_iterations = c.max_iterations;
        opt.epsilon = c.epsilon;
        opt.seed = fit_seed;
        const auto fit = parafac_als(t, opt);
        out.nmse = fit.report.final_nmse;
        if (cont) {
            out.s = reconstruct_from_parafac(fit.model.factors, fit.model.weights);
            return out;
        }
        const auto bits = expand(spec.phase_bits, sizes.size());
        const auto q = quantize_parafac(fit.model, bits, spec.weight_bits);
        const auto duration = feedback_duration_parafac(c.system, ch.g_f, layout_of(q), c.include_preamble);
        out.s = reconstruct(decode_feedback(encode_feedback(q)));
        out.payload_bits = duration.payload_bits;
        out.tf_s = duration.seconds;
        return out;
    }

    const auto fit = tucker_hosvd(t, spec.ranks);
    out.nmse = fit.report.final_nmse;
    if (cont) {
        out.s = reconstruct_from_tucker(fit.model);
        return out;
    }
    const auto bits = expand(spec.phase_bits, sizes.size());
    const auto q = quantize_tucker(fit.model, bits, spec.weight_bits);
    const auto duration =
        feedback_duration_tucker(c.system, ch.g_f, layout_of(q), c.tucker_accounting, c.include_preamble);
    out.s = reconstruct(decode_feedback(encode_feedback(q)));
    out.payload_bits = duration.payload_bits;
    out.tf_s = duration.seconds;
    return out;
}

void run_trial(const SweepPoint& pt, const std::string& sweep, std::size_t point_index, std::size_t trial,
               std::span<ResultRow> rows) {
    const auto& c = pt.cfg;
    const std::uint64_t seed = derive_seed({c.seed, hash_string(c.scenario), point_index, trial});
    Rng rng(seed);
    const GeometrySample geo = sample_geometry(rng, panel_of(c));
    const ChannelRealization ch = sample_channels(channel_params(c), geo, rng);
    const Beamformers bf = design_beamformers(ch);
    const double noise = c.noise_var.value_or(c.system.normalized_noise());

    for (std::size_t m = 0; m < c.models.size(); ++m) {
        const auto start = std::chrono::steady_clock::now();
        const ModelOutcome o = evaluate_model(c, c.models[m], ch, bf, derive_seed({seed, m}));
        const double gain = std::norm(cascaded_gain(ch, bf.w, bf.q, o.s.entries));
        const FrameTiming timing = frame_timing(c.system, o.tf_s);
        const double se = spectral_efficiency(c.system, data_rate_bpshz(c.system, gain), timing);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

        ResultRow& r = rows[m];
        r.scenario = c.scenario;
        r.model = c.models[m].tag.empty() ? default_tag(c.models[m]) : c.models[m].tag;
        r.sweep_name = sweep;
        r.sweep_value = pt.value;
        r.seed = seed;
        r.rate_bpshz = std::log2(1.0 + gain / noise);
        r.se_bps = se;
        r.ee_bpj = energy_efficiency(c.system, se, timing);
        r.tf_s = o.tf_s;
        r.payload_bits = o.payload_bits;
        r.nmse = o.nmse;
        r.elapsed_s = c.timing ? elapsed.count() : 0.0;
    }
}

std::string quote_csv(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

// Splits one CSV record; quoted fields may contain separators and newlines.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool quoted = false;
    bool any = false;
    char ch = 0;
    while (in.get(ch)) {
        any = true;
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get(ch);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (quoted) throw ConfigError("CSV: unterminated quoted field");
    if (!any) return false;
    fields.push_back(std::move(field));
    return true;
}

} // namespace

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
    system.validate();
    if (trials == 0) throw ConfigError("trials must be at least 1");
    if (models.empty()) throw ConfigError("no models configured");
    if (sweep != SweepVariable::kNone && grid.empty()) throw ConfigError("sweep grid is empty");
    if (!std::isfinite(k_db)) throw ConfigError("k_db must be finite");
    if (noise_var && !(*noise_var > 0.0)) throw ConfigError("noise_var must be positive");
    if (!(epsilon >= 0.0) || max_iterations == 0) throw ConfigError("invalid ALS stopping rule");

    std::vector<double> points = grid;
    if (points.empty()) points.push_back(0.0);
    for (double v : points) {
        if (!std::isfinite(v)) throw ConfigError("grid values must be finite");
        const SweepPoint pt = apply_sweep(*this, sweep == SweepVariable::kNone ? 0.0 : v);
        const auto& c = pt.cfg;
        c.system.validate();
        const PanelSplit panel = panel_of(c);
        if (panel.n_h * panel.n_v != c.system.n)
            throw ConfigError("IRS panel does not match N = " + std::to_string(c.system.n));
        for (const auto& m : c.models) {
            // Continuous models are checked with a stand-in 1-bit resolution.
            const auto bits = m.continuous() ? std::vector<unsigned>{1} : m.phase_bits;
            if (m.kind == ModelKind::kBaseline) {
                if (bits.size() != 1) throw ConfigError(m.tag + ": baseline takes one resolution");
                irsfb::validate(BaselineLayout{c.system.n, bits[0]});
                continue;
            }
            const Shape sizes = resolve_sizes(m, c.system.n);
            const auto expanded = expand(bits, sizes.size());
            if (m.kind == ModelKind::kParafac) irsfb::validate(ParafacLayout{sizes, m.rank, expanded, m.weight_bits});
            else irsfb::validate(TuckerLayout{sizes, m.ranks, expanded, m.weight_bits});
        }
    }
}

std::string sweep_name(SweepVariable v) {
    switch (v) {
    case SweepVariable::kNone: return "none";
    case SweepVariable::kRicianKdb: return "k_db";
    case SweepVariable::kIrsSize: return "n";
    case SweepVariable::kFeedbackBandwidth: return "b_f_hz";
    case SweepVariable::kFeedbackPower: return "p_f_dbm";
    case SweepVariable::kResolution: return "bits";
    }
    return "none";
}

SweepVariable parse_sweep_variable(const std::string& name) {
    for (auto v : {SweepVariable::kNone, SweepVariable::kRicianKdb, SweepVariable::kIrsSize,
                   SweepVariable::kFeedbackBandwidth, SweepVariable::kFeedbackPower, SweepVariable::kResolution}) {
        if (sweep_name(v) == name) return v;
    }
    throw ConfigError("unknown sweep variable '" + name + "' (none, k_db, n, b_f_hz, p_f_dbm, bits)");
}

std::string default_tag(const ModelSpec& m) {
    const std::string bits = m.continuous() ? "cont" : "b" + join_bits(m.phase_bits);
    switch (m.kind) {
    case ModelKind::kBaseline: return "baseline_" + bits;
    case ModelKind::kParafac: {
        const std::string shape = m.sizes.empty() ? "P" + std::to_string(m.order) : join(m.sizes, "x");
        return "parafac_" + shape + "_R" + std::to_string(m.rank) + "_" + bits;
    }
    case ModelKind::kTucker: {
        const std::string shape = m.sizes.empty() ? "P" + std::to_string(m.order) : join(m.sizes, "x");
        return "tucker_" + shape + "_R" + join(m.ranks, "x") + "_" + bits;
    }
    }
    return "model";
}

ModelSpec parse_model_spec(const std::string& text) {
    std::istringstream is(text);
    std::string kind;
    is >> kind;
    ModelSpec m;
    if (kind == "baseline") m.kind = ModelKind::kBaseline;
    else if (kind == "parafac") m.kind = ModelKind::kParafac;
    else if (kind == "tucker") m.kind = ModelKind::kTucker;
    else throw ConfigError("unknown model kind '" + kind + "' (baseline, parafac, tucker)");

    bool wbits_set = false;
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError("model option '" + tok + "' is not key=value");
        const std::string key = tok.substr(0, eq);
        const std::string value = tok.substr(eq + 1);
        if (key == "sizes") m.sizes = parse_shape(value, key);
        else if (key == "p") m.order = parse_uint(value, key);
        else if (key == "rank" || key == "r") m.rank = parse_uint(value, key);
        else if (key == "ranks") m.ranks = parse_shape(value, key);
        else if (key == "bits") m.phase_bits = parse_bits(value, key);
        else if (key == "wbits") {
            m.weight_bits = static_cast<unsigned>(parse_uint(value, key));
            wbits_set = true;
        } else if (key == "tag") m.tag = value;
        else throw ConfigError("unknown model option '" + key + "'");
    }
    if (!wbits_set && !m.continuous() && m.phase_bits.size() == 1) m.weight_bits = m.phase_bits[0];
    if (m.kind != ModelKind::kBaseline && m.sizes.empty() && m.order == 0)
        throw ConfigError(kind + " model needs sizes= or p=");
    if (!m.sizes.empty() && m.order != 0 && m.order != m.sizes.size())
        throw ConfigError("p= disagrees with the number of sizes");
    if (m.kind == ModelKind::kTucker && m.ranks.empty()) throw ConfigError("tucker model needs ranks=");
    if (m.continuous() && m.phase_bits.size() != 1) throw ConfigError("bits=0 cannot be mixed with other resolutions");
    for (auto b : m.phase_bits)
        if (b == 0 && !m.continuous()) throw ConfigError("bits=0 cannot be mixed with other resolutions");
    if (m.tag.empty()) m.tag = default_tag(m);
    return m;
}

Shape resolve_sizes(const ModelSpec& spec, std::size_t n) {
    if (!spec.sizes.empty()) {
        if (shape_product(spec.sizes) != n)
            throw ConfigError("factor sizes " + join(spec.sizes, "x") + " do not multiply to N = " + std::to_string(n));
        return spec.sizes;
    }
    const std::size_t order = spec.order;
    if (order == 0) throw ConfigError("model has neither sizes nor an order");
    const std::size_t tail = std::size_t{1} << (order - 1);
    if (order > 1 && (n % tail != 0 || n / tail < 1))
        throw ConfigError("N = " + std::to_string(n) + " is not divisible by 2^(P-1) for P = " + std::to_string(order));
    Shape sizes(order, 2);
    sizes[0] = n / tail;
    return sizes;
}

std::vector<std::string> scenario_names() { return {"fig5", "fig6", "fig7", "fig8", "fig9", "fig10_12"}; }

ExperimentConfig scenario_preset(const std::string& name) {
    if (name == "fig5") {
        auto c = rate_scenario(name);
        const Shape sizes{64, 4, 4};
        c.models = {baseline_spec(0), baseline_spec(3)};
        for (std::size_t r : {1, 4, 16}) c.models.push_back(parafac_spec(sizes, r, 0));
        for (std::size_t r : {1, 4, 16}) c.models.push_back(parafac_spec(sizes, r, 3));
        for (const Shape& ranks : {Shape{4, 4, 4}, Shape{16, 4, 4}}) {
            c.models.push_back(tucker_spec(sizes, ranks, 0));
            c.models.push_back(tucker_spec(sizes, ranks, 3));
        }
        return c;
    }
    if (name == "fig6") {
        auto c = rate_scenario(name);
        c.models = {baseline_spec(3)};
        for (std::size_t p : {2, 3, 4, 10}) c.models.push_back(parafac_spec({}, 1, 3, p));
        return c;
    }
    if (name == "fig7") {
        auto c = rate_scenario(name);
        c.sweep = SweepVariable::kIrsSize;
        c.grid = {256, 512, 1024, 2048, 4096};
        c.k_db = 10.0;
        c.models = {baseline_spec(3)};
        for (std::size_t p : {2, 3, 4}) c.models.push_back(parafac_spec({}, 1, 3, p));
        return c;
    }
    if (name == "fig8") {
        // Fixed 1024-bit control link: each size split gets the finest
        // per-factor resolution that still fits.
        auto c = rate_scenario(name);
        c.models = {baseline_spec(0), baseline_spec(1),
                    with_bits(parafac_spec({512, 2}, 1, 1), {1, 16}),
                    with_bits(parafac_spec({256, 4}, 1, 3), {3, 16}),
                    with_bits(parafac_spec({128, 8}, 1, 7), {7, 16}),
                    with_bits(parafac_spec({64, 16}, 1, 15), {15, 4})};
        return c;
    }
    if (name == "fig9") {
        auto c = link_scenario(name);
        c.system.m_t = c.system.m_r = 16;
        c.sweep = SweepVariable::kFeedbackBandwidth;
        c.grid = {50e3, 100e3, 200e3, 500e3, 1e6, 2e6};
        return c;
    }
    if (name == "fig10_12") {
        auto c = link_scenario(name);
        c.system.m_t = c.system.m_r = 2;
        c.sweep = SweepVariable::kFeedbackPower;
        c.grid = {-20, -15, -10, -5, 0, 5, 10};
        return c;
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

ExperimentConfig parse_config(std::istream& in) {
    std::vector<std::pair<std::size_t, std::pair<std::string, std::string>>> entries;
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::string> preset;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (key == "preset") {
            if (preset) throw ConfigError("line " + std::to_string(lineno) + ": preset given twice");
            preset = value;
            continue;
        }
        entries.push_back({lineno, {std::move(key), std::move(value)}});
    }

    ExperimentConfig c;
    try {
        if (preset) c = scenario_preset(*preset);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("preset: ") + e.what());
    }
    bool models_seen = false;
    for (const auto& [ln, kv] : entries) {
        try {
            if (kv.first == "model") {
                if (!models_seen) c.models.clear();
                models_seen = true;
                c.models.push_back(parse_model_spec(kv.second));
            } else {
                apply_key(c, kv.first, kv.second);
            }
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(ln) + ": " + e.what());
        }
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in);
}

// ---------------------------------------------------------------- runner

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<double> values = cfg.grid;
    if (cfg.sweep == SweepVariable::kNone || values.empty()) values = {0.0};
    std::vector<SweepPoint> points;
    for (double v : values) points.push_back(apply_sweep(cfg, v));

    const std::string sweep = sweep_name(cfg.sweep);
    const std::size_t per_trial = cfg.models.size();
    const std::size_t jobs = points.size() * cfg.trials;
    std::vector<ResultRow> rows(jobs * per_trial);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs; j = next++) {
            try {
                const std::size_t point = j / cfg.trials;
                const std::size_t trial = j % cfg.trials;
                run_trial(points[point], sweep, point, trial, std::span(rows).subspan(j * per_trial, per_trial));
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = jobs;
            }
        }
    };

    std::size_t threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

// ---------------------------------------------------------------- CSV

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return {buf.data(), res.ptr};
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    // Integers go through the stream; keep them free of locale grouping.
    const std::locale previous = os.imbue(std::locale::classic());
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
        os << quote_csv(r.scenario) << ',' << quote_csv(r.model) << ',' << quote_csv(r.sweep_name) << ','
           << format_double(r.sweep_value) << ',' << r.seed << ',' << format_double(r.rate_bpshz) << ','
           << format_double(r.se_bps) << ',' << format_double(r.ee_bpj) << ',' << format_double(r.tf_s) << ','
           << r.payload_bits << ',' << format_double(r.nmse) << ',' << format_double(r.elapsed_s) << '\n';
    }
    os.imbue(previous);
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_csv(os, rows);
    os.flush();
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

std::vector<ResultRow> read_csv(std::istream& in) {
    std::vector<std::string> f;
    if (!read_record(in, f) || f != csv_columns()) throw ConfigError("CSV: missing or unexpected header");
    std::vector<ResultRow> rows;
    std::size_t line = 1;
    while (read_record(in, f)) {
        ++line;
        if (f.size() != csv_columns().size())
            throw ConfigError("CSV line " + std::to_string(line) + ": expected 12 fields, got " + std::to_string(f.size()));
        ResultRow r;
        r.scenario = f[0];
        r.model = f[1];
        r.sweep_name = f[2];
        r.sweep_value = parse_double(f[3], "sweep_value");
        r.seed = parse_uint(f[4], "seed");
        r.rate_bpshz = parse_double(f[5], "rate_bpshz");
        r.se_bps = parse_double(f[6], "se_bps");
        r.ee_bpj = parse_double(f[7], "ee_bpj");
        r.tf_s = parse_double(f[8], "tf_s");
        r.payload_bits = parse_uint(f[9], "payload_bits");
        r.nmse = parse_double(f[10], "nmse");
        r.elapsed_s = parse_double(f[11], "elapsed_s");
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace irsfb
