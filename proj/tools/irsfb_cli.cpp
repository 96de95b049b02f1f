// SPDX-License-Identifier: Apache-2.0
//
// irsfb: command-line front end for the feedback compression library.
//
//   irsfb decompose --input phases.txt --model parafac --sizes 64,4,4 --rank 2
//   irsfb payload   --n 1024 --model parafac --sizes 32,8,4 --r 1
//   irsfb simulate  --config fig6.cfg [--quick] [--output rows.csv]
//   irsfb codec     encode|decode|roundtrip ...
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "irsfb/channel.hpp"
#include "irsfb/decomposition.hpp"
#include "irsfb/errors.hpp"
#include "irsfb/feedback.hpp"
#include "irsfb/harness.hpp"
#include "irsfb/random.hpp"
#include "irsfb/reconstruction.hpp"
#include "irsfb/system.hpp"

namespace {

using namespace irsfb;

// Phase vector text format: one "re im" pair per line, '#' comments.
CVector read_phase_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    CVector v;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        is.imbue(std::locale::classic());
        double re = 0.0;
        double im = 0.0;
        if (!(is >> re)) continue;
        if (!(is >> im)) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 're im'");
        v.emplace_back(re, im);
    }
    if (v.empty()) throw ConfigError(path + " holds no entries");
    return v;
}

void write_phase_file(const std::string& path, std::span<const Complex> v) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    for (const auto& z : v) os << format_double(z.real()) << ' ' << format_double(z.imag()) << '\n';
}

struct ChannelOptions {
    std::size_t n = 1024;
    std::size_t m = 2;
    double k_db = 10.0;
    std::uint64_t seed = 1;
};

// Optimal phase vector of one sampled channel realization.
CVector sample_optimal_phases(const ChannelOptions& o) {
    Rng rng(o.seed);
    ChannelParams p;
    p.n = o.n;
    p.m_t = p.m_r = o.m;
    p.k_h = p.k_g = db_to_linear(o.k_db);
    const auto geo = sample_geometry(rng, default_panel_split(o.n));
    return design_beamformers(sample_channels(p, geo, rng)).s_opt.entries;
}

struct ModelOptions {
    std::string model = "parafac";
    std::vector<std::size_t> sizes;
    std::size_t order = 0;
    std::size_t rank = 1;
    std::vector<std::size_t> ranks;
    std::vector<unsigned> bits{3};
    unsigned wbits = 3;
};

void add_model_options(CLI::App* app, ModelOptions& o) {
    app->add_option("--model", o.model, "baseline, parafac or tucker")
        ->check(CLI::IsMember({"baseline", "parafac", "tucker"}));
    app->add_option("--sizes", o.sizes, "factor sizes N_1,...,N_P")->delimiter(',');
    app->add_option("--p", o.order, "number of factors; sizes [N/2^(P-1), 2, ..., 2]");
    app->add_option("--r,--rank", o.rank, "PARAFAC rank R");
    app->add_option("--ranks", o.ranks, "Tucker ranks R_1,...,R_P")->delimiter(',');
    app->add_option("--bits", o.bits, "phase resolution, one value or one per factor")->delimiter(',');
    app->add_option("--wbits", o.wbits, "weight resolution");
}

ModelSpec to_spec(const ModelOptions& o) {
    ModelSpec m;
    m.kind = o.model == "baseline" ? ModelKind::kBaseline
           : o.model == "tucker"   ? ModelKind::kTucker
                                   : ModelKind::kParafac;
    m.sizes = Shape(o.sizes.begin(), o.sizes.end());
    m.order = o.order;
    m.rank = o.rank;
    m.ranks = Shape(o.ranks.begin(), o.ranks.end());
    m.phase_bits = o.bits;
    m.weight_bits = o.wbits;
    if (m.kind != ModelKind::kBaseline && m.sizes.empty() && m.order == 0)
        throw ConfigError("--sizes or --p is required for factorized models");
    if (m.kind == ModelKind::kTucker && m.ranks.empty()) throw ConfigError("--ranks is required for tucker");
    return m;
}

std::vector<unsigned> expand_bits(const std::vector<unsigned>& bits, std::size_t order) {
    return bits.size() == 1 ? std::vector<unsigned>(order, bits[0]) : bits;
}

// Shortest text that reads back to the same double, e.g. 51.2.
std::string shortest(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

void print_shape(std::ostream& os, const Shape& s) {
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
}

// ---------------------------------------------------------------- decompose

struct DecomposeOptions {
    std::string input;
    bool sample = false;
    ChannelOptions channel;
    ModelOptions model;
    std::size_t max_iterations = 500;
    double epsilon = 1e-6;
    std::uint64_t fit_seed = 0;
    bool trace = false;
};

int run_decompose(const DecomposeOptions& o) {
    const CVector s = o.sample ? sample_optimal_phases(o.channel) : read_phase_file(o.input);
    const ModelSpec spec = to_spec(o.model);
    if (spec.kind == ModelKind::kBaseline) throw ConfigError("decompose needs --model parafac or tucker");
    const Shape sizes = resolve_sizes(spec, s.size());
    const DenseTensor t = tensorize(s, sizes);

    FitReport report;
    std::cout << "model: " << o.model.model << "\nshape: ";
    print_shape(std::cout, sizes);
    if (spec.kind == ModelKind::kParafac) {
        AlsOptions opt{spec.rank, o.max_iterations, o.epsilon, o.fit_seed};
        const auto fit = parafac_als(t, opt);
        report = fit.report;
        std::cout << "\nrank: " << spec.rank << "\nweights:";
        for (double w : fit.model.weights) std::cout << ' ' << format_double(w);
    } else {
        const auto fit = tucker_hosvd(t, spec.ranks);
        report = fit.report;
        std::cout << "\nranks: ";
        print_shape(std::cout, spec.ranks);
    }
    std::cout << "\niterations: " << report.iterations << "\nconverged: " << (report.converged ? "true" : "false")
              << "\nfinal_nmse: " << format_double(report.final_nmse)
              << "\nrank_exceeds_design: " << (report.rank_exceeds_design ? "true" : "false") << '\n';
    if (o.trace) {
        for (std::size_t i = 0; i < report.nmse_trace.size(); ++i)
            std::cout << "nmse[" << i + 1 << "]: " << format_double(report.nmse_trace[i]) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- payload

struct PayloadOptions {
    std::size_t n = 1024;
    ModelOptions model;
    bool no_preamble = false;
    std::string accounting = "literal";
    SystemParams system;
    double b_f_hz = 200e3;
    double p_f_dbm = -10.0;
    double pathloss_db = 110.0;
    std::optional<double> g_f_db;
};

int run_payload(const PayloadOptions& o) {
    const ModelSpec spec = to_spec(o.model);
    SystemParams sys = o.system;
    sys.n = o.n;
    sys.b_f_hz = o.b_f_hz;
    sys.p_f_w = dbm_to_watts(o.p_f_dbm);
    sys.pathloss_db = o.pathloss_db;
    sys.validate();
    // |g_F|^2 defaults to its mean beta_F.
    const double g_gain = o.g_f_db ? db_to_linear(*o.g_f_db) : sys.pathloss_linear();
    const Complex g_f(std::sqrt(g_gain), 0.0);
    const bool preamble = !o.no_preamble;

    std::uint64_t phases = 0;
    PayloadCount count;
    FeedbackDuration duration;
    std::cout << "model: " << o.model.model << "\nN: " << o.n << '\n';
    if (spec.kind == ModelKind::kBaseline) {
        if (spec.phase_bits.size() != 1) throw ConfigError("baseline takes a single --bits value");
        const BaselineLayout layout{o.n, spec.phase_bits[0]};
        phases = conveyed_phases(layout);
        count = payload_bits(layout);
        count.preamble_bits = 0;  // the uncompressed reference carries no preamble
        duration = feedback_duration_baseline(sys, g_f, layout);
    } else {
        const Shape sizes = resolve_sizes(spec, o.n);
        const auto bits = expand_bits(spec.phase_bits, sizes.size());
        std::cout << "sizes: ";
        print_shape(std::cout, sizes);
        std::cout << '\n';
        if (spec.kind == ModelKind::kParafac) {
            const ParafacLayout layout{sizes, spec.rank, bits, spec.weight_bits};
            phases = conveyed_phases(layout);
            count = payload_bits(layout);
            duration = feedback_duration_parafac(sys, g_f, layout, preamble);
        } else {
            const TuckerLayout layout{sizes, spec.ranks, bits, spec.weight_bits};
            const auto acc = o.accounting == "codec" ? PayloadAccounting::kCodec : PayloadAccounting::kLiteral;
            phases = conveyed_phases(layout);
            count = payload_bits(layout, acc);
            duration = feedback_duration_tucker(sys, g_f, layout, acc, preamble);
        }
    }
    const std::uint64_t total = count.total(preamble);
    std::cout << "phases: " << phases << "\nphase_ratio: " << shortest(static_cast<double>(o.n) / static_cast<double>(phases))
              << "\npreamble_bits: " << (preamble ? count.preamble_bits : 0) << "\nbody_bits: " << count.body_bits
              << "\npayload_bits: " << total << "\nbaseline_bits: " << std::uint64_t{o.n} * spec.phase_bits[0]
              << "\nbit_ratio: "
              << shortest(static_cast<double>(std::uint64_t{o.n} * spec.phase_bits[0]) / static_cast<double>(total))
              << "\ncapacity_bps: " << format_double(feedback_capacity_bps(sys, g_f))
              << "\ntf_s: " << format_double(duration.seconds) << '\n';
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
    std::string config;
    std::string scenario;
    bool quick = false;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::string output;
    bool timing = false;
};

int run_simulate(const SimulateOptions& o) {
    ExperimentConfig cfg;
    if (!o.config.empty()) cfg = load_config(o.config);
    else if (!o.scenario.empty()) cfg = scenario_preset(o.scenario);
    else throw ConfigError("simulate needs --config or --scenario");
    if (o.quick) cfg.trials = 20;
    if (o.trials) cfg.trials = *o.trials;
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    if (o.timing) cfg.timing = true;
    if (!o.output.empty()) cfg.output = o.output;

    const auto rows = run_experiment(cfg);
    if (cfg.output.empty() || cfg.output == "-") {
        write_csv(std::cout, rows);
    } else {
        emit_csv(rows, cfg.output);
        std::cerr << "wrote " << rows.size() << " rows to " << cfg.output << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- codec

struct CodecOptions {
    std::string input;
    std::string message;
    std::string output;
    ModelOptions model;
    std::size_t max_iterations = 500;
    double epsilon = 1e-6;
    std::uint64_t fit_seed = 0;
    std::size_t configs = 100;
    std::uint64_t seed = 1;
};

FeedbackPayload quantize_vector(const CVector& s, const CodecOptions& o) {
    const ModelSpec spec = to_spec(o.model);
    if (spec.kind == ModelKind::kBaseline) {
        if (spec.phase_bits.size() != 1) throw ConfigError("baseline takes a single --bits value");
        return quantize_baseline(s, spec.phase_bits[0]);
    }
    const Shape sizes = resolve_sizes(spec, s.size());
    const DenseTensor t = tensorize(s, sizes);
    const auto bits = expand_bits(spec.phase_bits, sizes.size());
    if (spec.kind == ModelKind::kParafac) {
        const auto fit = parafac_als(t, AlsOptions{spec.rank, o.max_iterations, o.epsilon, o.fit_seed});
        return quantize_parafac(fit.model, bits, spec.weight_bits);
    }
    return quantize_tucker(tucker_hosvd(t, spec.ranks).model, bits, spec.weight_bits);
}

const char* kind_name(ModelKind k) {
    switch (k) {
    case ModelKind::kBaseline: return "baseline";
    case ModelKind::kParafac: return "parafac";
    case ModelKind::kTucker: return "tucker";
    }
    return "unknown";
}

int run_encode(const CodecOptions& o) {
    const FeedbackPayload payload = quantize_vector(read_phase_file(o.input), o);
    const FeedbackMessage msg = encode_feedback(payload);
    write_message_file(o.message, msg);
    std::cout << "model: " << kind_name(kind_of(payload)) << "\nbits: " << msg.bit_length << "\nbytes: " << msg.bytes.size()
              << '\n';
    return 0;
}

int run_decode(const CodecOptions& o) {
    const FeedbackMessage msg = read_message_file(o.message);
    const FeedbackPayload payload = decode_feedback(msg);
    const PhaseShiftVector s = reconstruct(payload);
    std::cout << "model: " << kind_name(kind_of(payload)) << "\nbits: " << msg.bit_length << "\nN: " << s.size()
              << "\nzero_magnitude_entries: " << s.zero_magnitude_count << '\n';
    if (!o.output.empty()) write_phase_file(o.output, s.entries);
    return 0;
}

// Random payloads of every kind; checks the bit-exact round trip and that the
// encoded length matches the analytic counter.
int run_roundtrip(const CodecOptions& o) {
    Rng rng(o.seed);
    std::uniform_int_distribution<unsigned> bits_dist(1, 8);
    std::uniform_int_distribution<int> kind_dist(0, 2);
    std::size_t failures = 0;
    for (std::size_t i = 0; i < o.configs; ++i) {
        const Shape sizes = [&] {
            std::uniform_int_distribution<std::size_t> order_dist(2, 4);
            std::uniform_int_distribution<std::size_t> size_dist(2, 6);
            Shape s(order_dist(rng));
            for (auto& n : s) n = size_dist(rng);
            return s;
        }();
        const CVector v = [&] {
            CVector s = complex_gaussian_vector(rng, shape_product(sizes));
            return project_unit_modulus(s).entries;
        }();
        FeedbackPayload payload;
        std::uint64_t expected = 0;
        const unsigned b = bits_dist(rng);
        const unsigned bw = bits_dist(rng);
        switch (kind_dist(rng)) {
        case 0: {
            auto q = quantize_baseline(v, b);
            expected = payload_bits(layout_of(q)).total();
            payload = std::move(q);
            break;
        }
        case 1: {
            AlsOptions opt{std::uniform_int_distribution<std::size_t>(1, 3)(rng), 50, 1e-6, rng()};
            auto q = quantize_parafac(parafac_als(tensorize(v, sizes), opt).model, std::vector<unsigned>{b}, bw);
            expected = payload_bits(layout_of(q)).total();
            payload = std::move(q);
            break;
        }
        default: {
            Shape ranks(sizes.size());
            for (std::size_t p = 0; p < sizes.size(); ++p)
                ranks[p] = std::uniform_int_distribution<std::size_t>(1, sizes[p])(rng);
            auto q = quantize_tucker(tucker_hosvd(tensorize(v, sizes), ranks).model, std::vector<unsigned>{b}, bw);
            expected = payload_bits(layout_of(q), PayloadAccounting::kCodec).total();
            payload = std::move(q);
            break;
        }
        }
        const FeedbackMessage msg = encode_feedback(payload);
        const bool ok = decode_feedback(msg) == payload && msg.bit_length == expected;
        if (!ok) {
            ++failures;
            std::cerr << "config " << i << ": round trip mismatch (" << kind_name(kind_of(payload)) << ")\n";
        }
    }
    std::cout << "configs: " << o.configs << "\nfailures: " << failures << '\n';
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank IRS phase-shift feedback: fits, payload accounting, codec and Monte-Carlo runs"};
    app.require_subcommand(1);

    DecomposeOptions dec;
    auto* dec_cmd = app.add_subcommand("decompose", "fit a PARAFAC or Tucker model to a phase vector");
    auto* in_opt = dec_cmd->add_option("--input", dec.input, "phase vector file, one 're im' pair per line");
    auto* sample_flag = dec_cmd->add_flag("--sample", dec.sample, "use the optimal phases of a sampled channel");
    in_opt->excludes(sample_flag);
    dec_cmd->add_option("--n", dec.channel.n, "IRS size for --sample");
    dec_cmd->add_option("--m", dec.channel.m, "antennas per side for --sample");
    dec_cmd->add_option("--k-db", dec.channel.k_db, "Rician factor in dB for --sample");
    dec_cmd->add_option("--channel-seed", dec.channel.seed, "seed for --sample");
    add_model_options(dec_cmd, dec.model);
    dec_cmd->add_option("--max-iterations", dec.max_iterations, "ALS iteration cap");
    dec_cmd->add_option("--epsilon", dec.epsilon, "ALS stopping threshold on the NMSE change");
    dec_cmd->add_option("--seed", dec.fit_seed, "ALS initialization seed");
    dec_cmd->add_flag("--trace", dec.trace, "print the NMSE of every iteration");

    PayloadOptions pay;
    auto* pay_cmd = app.add_subcommand("payload", "feedback payload and duration for one layout");
    pay_cmd->add_option("--n", pay.n, "number of IRS elements");
    add_model_options(pay_cmd, pay.model);
    pay_cmd->add_flag("--no-preamble", pay.no_preamble, "leave the preamble out of the payload");
    pay_cmd->add_option("--accounting", pay.accounting, "Tucker core and weight accounting")
        ->check(CLI::IsMember({"literal", "codec"}));
    pay_cmd->add_option("--b-f-hz", pay.b_f_hz, "feedback bandwidth");
    pay_cmd->add_option("--p-f-dbm", pay.p_f_dbm, "feedback power");
    pay_cmd->add_option("--pathloss-db", pay.pathloss_db, "control-link path loss");
    pay_cmd->add_option("--g-f-db", pay.g_f_db, "control-link gain |g_F|^2 in dB (default: its mean)");

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "run a Monte-Carlo experiment and write CSV rows");
    sim_cmd->add_option("--config", sim.config, "experiment config file")->check(CLI::ExistingFile);
    sim_cmd->add_option("--scenario", sim.scenario, "built-in scenario")->check(CLI::IsMember(scenario_names()));
    sim_cmd->add_flag("--quick", sim.quick, "20 trials per sweep point");
    sim_cmd->add_option("--trials", sim.trials, "trials per sweep point");
    sim_cmd->add_option("--seed", sim.seed, "master seed");
    sim_cmd->add_option("--threads", sim.threads, "worker threads (0: all cores)");
    sim_cmd->add_option("--output,-o", sim.output, "CSV path ('-' for stdout)");
    sim_cmd->add_flag("--timing", sim.timing, "fill the elapsed_s column");

    CodecOptions codec;
    auto* codec_cmd = app.add_subcommand("codec", "encode, decode or round-trip feedback messages");
    codec_cmd->require_subcommand(1);
    auto* enc_cmd = codec_cmd->add_subcommand("encode", "fit, quantize and encode a phase vector");
    enc_cmd->add_option("--input", codec.input, "phase vector file")->required();
    enc_cmd->add_option("--out", codec.message, "message file")->required();
    add_model_options(enc_cmd, codec.model);
    enc_cmd->add_option("--max-iterations", codec.max_iterations, "ALS iteration cap");
    enc_cmd->add_option("--seed", codec.fit_seed, "ALS initialization seed");
    auto* dec2_cmd = codec_cmd->add_subcommand("decode", "decode a message and rebuild the phase vector");
    dec2_cmd->add_option("--in", codec.message, "message file")->required();
    dec2_cmd->add_option("--output", codec.output, "write the rebuilt phases here");
    auto* rt_cmd = codec_cmd->add_subcommand("roundtrip", "bit-exact round trip over random payloads");
    rt_cmd->add_option("--configs", codec.configs, "number of random payloads");
    rt_cmd->add_option("--seed", codec.seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dec_cmd) {
            if (!dec.sample && dec.input.empty()) throw ConfigError("decompose needs --input or --sample");
            return run_decompose(dec);
        }
        if (*pay_cmd) return run_payload(pay);
        if (*sim_cmd) return run_simulate(sim);
        if (*enc_cmd) return run_encode(codec);
        if (*dec2_cmd) return run_decode(codec);
        if (*rt_cmd) return run_roundtrip(codec);
    } catch (const std::exception& e) {
        std::cerr << "irsfb: error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
