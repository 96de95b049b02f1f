// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <locale>
#include <set>
#include <sstream>

#include "irsfb/errors.hpp"
#include "irsfb/harness.hpp"
#include "irsfb/random.hpp"

namespace irsfb {
namespace {

ExperimentConfig small_config() {
    std::istringstream in(R"(# small mixed run
scenario = unit
sweep = k_db
grid = -5, 5
trials = 3
seed = 42
n = 64
m = 2
model = baseline bits=3
model = parafac sizes=8,8 rank=1 bits=3
model = tucker sizes=16,2,2 ranks=4,2,2 bits=2 wbits=4
)");
    return parse_config(in);
}

std::string csv_of(const std::vector<ResultRow>& rows) {
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

TEST(Harness, SmokeBaselineSingleTrial) {
    ExperimentConfig c;
    c.scenario = "smoke";
    c.trials = 1;
    c.k_db = 10.0;
    c.system.n = 64;
    c.models = {parse_model_spec("baseline bits=3")};
    const auto rows = run_experiment(c);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_GT(rows[0].rate_bpshz, 0.0);
    EXPECT_GT(rows[0].se_bps, 0.0);
    EXPECT_GT(rows[0].ee_bpj, 0.0);
    EXPECT_GT(rows[0].tf_s, 0.0);
    EXPECT_EQ(rows[0].payload_bits, 64u * 3u);
    EXPECT_EQ(rows[0].model, "baseline_b3");
    EXPECT_EQ(rows[0].elapsed_s, 0.0);
}

TEST(Harness, RowOrderAndCount) {
    const ExperimentConfig c = small_config();
    const auto rows = run_experiment(c);
    ASSERT_EQ(rows.size(), 2u * 3u * 3u);
    std::size_t i = 0;
    for (double k : {-5.0, 5.0})
        for (int t = 0; t < 3; ++t)
            for (const char* tag : {"baseline_b3", "parafac_8x8_R1_b3", "tucker_16x2x2_R4x2x2_b2"}) {
                EXPECT_EQ(rows[i].sweep_value, k);
                EXPECT_EQ(rows[i].sweep_name, "k_db");
                EXPECT_EQ(rows[i].model, tag);
                EXPECT_EQ(rows[i].scenario, "unit");
                ++i;
            }
}

TEST(Harness, SeedsFollowDerivationAndDifferAcrossPoints) {
    const ExperimentConfig c = small_config();
    const auto rows = run_experiment(c);
    std::set<std::uint64_t> seeds;
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t t = 0; t < 3; ++t) {
            const std::uint64_t expected = derive_seed({42, hash_string("unit"), p, t});
            for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(rows[(p * 3 + t) * 3 + m].seed, expected);
            seeds.insert(expected);
        }
    EXPECT_EQ(seeds.size(), 6u);
    // Distinct trials draw distinct channels.
    EXPECT_NE(rows[0].rate_bpshz, rows[3].rate_bpshz);
}

TEST(Harness, ByteIdenticalAcrossRunsAndThreadCounts) {
    ExperimentConfig c = small_config();
    c.threads = 1;
    const std::string a = csv_of(run_experiment(c));
    const std::string b = csv_of(run_experiment(c));
    c.threads = 4;
    const std::string d = csv_of(run_experiment(c));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, d);
    c.seed = 43;
    EXPECT_NE(csv_of(run_experiment(c)), a);
}

TEST(Harness, ContinuousModelsCostNothing) {
    ExperimentConfig c = small_config();
    c.models = {parse_model_spec("baseline bits=0"), parse_model_spec("parafac sizes=8,8 rank=1 bits=0")};
    for (const auto& r : run_experiment(c)) {
        EXPECT_EQ(r.payload_bits, 0u);
        EXPECT_EQ(r.tf_s, 0.0);
    }
}

TEST(Harness, BaselineContinuousIsTheOptimum) {
    ExperimentConfig c = small_config();
    c.models = {parse_model_spec("baseline bits=0"), parse_model_spec("parafac sizes=8,8 rank=2 bits=3")};
    const auto rows = run_experiment(c);
    for (std::size_t i = 0; i < rows.size(); i += 2) EXPECT_GE(rows[i].rate_bpshz + 1e-12, rows[i + 1].rate_bpshz);
}

TEST(Harness, TimingFillsElapsed) {
    ExperimentConfig c = small_config();
    c.timing = true;
    c.trials = 1;
    double total = 0.0;
    for (const auto& r : run_experiment(c)) total += r.elapsed_s;
    EXPECT_GT(total, 0.0);
}

TEST(Csv, HeaderOnlyForNoRows) {
    EXPECT_EQ(csv_of({}),
              "scenario,model,sweep_name,sweep_value,seed,rate_bpshz,se_bps,ee_bpj,tf_s,payload_bits,nmse,elapsed_s\n");
}

TEST(Csv, RoundTripAndQuoting) {
    auto rows = run_experiment(small_config());
    rows[0].scenario = "a,\"quoted\" name";
    rows[1].sweep_value = 0.1 + 0.2;
    rows[2].nmse = 1e-300;
    std::istringstream in(csv_of(rows));
    EXPECT_EQ(read_csv(in), rows);
}

TEST(Csv, SeventeenSignificantDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(format_double(0.0), "0");
}

TEST(Csv, LocaleIndependent) {
    ResultRow r;
    r.scenario = "loc";
    r.model = "m";
    r.sweep_name = "k_db";
    r.sweep_value = 2.5;
    r.seed = 1234567;
    r.rate_bpshz = 3.25;
    r.payload_bits = 1234567;
    const std::string reference = csv_of({r});

    // A stream locale with a comma decimal separator and digit grouping.
    struct Comma : std::numpunct<char> {
        char do_decimal_point() const override { return ','; }
        char do_thousands_sep() const override { return '.'; }
        std::string do_grouping() const override { return "\3"; }
    };
    std::ostringstream os;
    os.imbue(std::locale(std::locale::classic(), new Comma));
    write_csv(os, {r});
    EXPECT_EQ(os.str(), reference);
    EXPECT_NE(reference.find(",2.5,1234567,3.25,"), std::string::npos);

    const std::locale previous = std::locale::global(std::locale(std::locale::classic(), new Comma));
    std::istringstream in(reference);
    const auto back = read_csv(in);
    std::locale::global(previous);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], r);
}

TEST(Csv, RejectsMalformedInput) {
    std::istringstream wrong_header("a,b\n");
    EXPECT_THROW(read_csv(wrong_header), ConfigError);
    std::istringstream unterminated(
        "scenario,model,sweep_name,sweep_value,seed,rate_bpshz,se_bps,ee_bpj,tf_s,payload_bits,nmse,elapsed_s\n\"x");
    EXPECT_THROW(read_csv(unterminated), ConfigError);
}

TEST(Config, PresetThenOverrides) {
    std::istringstream in("trials = 7\npreset = fig6\nseed = 9\n");
    const ExperimentConfig c = parse_config(in);
    EXPECT_EQ(c.scenario, "fig6");
    EXPECT_EQ(c.trials, 7u);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(c.sweep, SweepVariable::kRicianKdb);
    EXPECT_FALSE(c.models.empty());
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, ModelLinesReplacePresetModels) {
    std::istringstream in("preset = fig5\nmodel = baseline bits=2\n");
    const ExperimentConfig c = parse_config(in);
    ASSERT_EQ(c.models.size(), 1u);
    EXPECT_EQ(default_tag(c.models[0]), "baseline_b2");
}

TEST(Config, AllPresetsValidate) {
    for (const auto& name : scenario_names()) {
        const ExperimentConfig c = scenario_preset(name);
        EXPECT_EQ(c.scenario, name);
        EXPECT_NO_THROW(c.validate()) << name;
    }
    EXPECT_THROW(scenario_preset("fig99"), ConfigError);
}

TEST(Config, Errors) {
    const auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    EXPECT_THROW(parse("trials\n"), ConfigError);
    EXPECT_THROW(parse("bogus = 1\n"), ConfigError);
    EXPECT_THROW(parse("trials = -3\n"), ConfigError);
    EXPECT_THROW(parse("k_db = ten\n"), ConfigError);
    EXPECT_THROW(parse("preset = fig5\npreset = fig6\n"), ConfigError);
    EXPECT_THROW(parse("sweep = volume\n"), ConfigError);
    EXPECT_THROW(parse("model = cp rank=2\n"), ConfigError);
    EXPECT_THROW(parse("model = parafac rank=2\n"), ConfigError);
    EXPECT_THROW(parse("model = tucker sizes=4,4\n"), ConfigError);
    EXPECT_THROW(parse("model = baseline bits=17\n"), ConfigError);
    try {
        parse("trials = 2\n\nbogus = 1\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }

    ExperimentConfig c = small_config();
    c.trials = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.models = {parse_model_spec("parafac sizes=8,4 rank=1")};
    EXPECT_THROW(c.validate(), ConfigError);
    c = small_config();
    c.grid.clear();
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Models, TagsAndAutomaticSizes) {
    EXPECT_EQ(default_tag(parse_model_spec("parafac p=3 rank=1 bits=3")), "parafac_P3_R1_b3");
    EXPECT_EQ(default_tag(parse_model_spec("parafac sizes=64,4,4 rank=16 bits=0")), "parafac_64x4x4_R16_cont");
    EXPECT_EQ(default_tag(parse_model_spec("tucker sizes=64,4,4 ranks=16,4,4 bits=3")), "tucker_64x4x4_R16x4x4_b3");
    EXPECT_EQ(parse_model_spec("baseline bits=3 tag=custom").tag, "custom");
    EXPECT_EQ(resolve_sizes(parse_model_spec("parafac p=3"), 1024), (Shape{256, 2, 2}));
    EXPECT_EQ(resolve_sizes(parse_model_spec("parafac p=10"), 1024), Shape(10, 2));
    EXPECT_THROW(resolve_sizes(parse_model_spec("parafac p=12"), 1024), ConfigError);
}

TEST(Sweep, Names) {
    for (auto v : {SweepVariable::kNone, SweepVariable::kRicianKdb, SweepVariable::kIrsSize,
                   SweepVariable::kFeedbackBandwidth, SweepVariable::kFeedbackPower, SweepVariable::kResolution})
        EXPECT_EQ(parse_sweep_variable(sweep_name(v)), v);
}

TEST(Sweep, ResolutionSweepOverridesBits) {
    ExperimentConfig c = small_config();
    c.sweep = SweepVariable::kResolution;
    c.grid = {1, 4};
    c.models = {parse_model_spec("baseline bits=3")};
    c.trials = 1;
    const auto rows = run_experiment(c);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].payload_bits, 64u);
    EXPECT_EQ(rows[1].payload_bits, 256u);
}

TEST(EmitCsv, WritesFile) {
    const auto path = std::filesystem::temp_directory_path() / "irsfb_emit_test.csv";
    emit_csv({}, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header.substr(0, 15), "scenario,model,");
    std::filesystem::remove(path);
    EXPECT_ANY_THROW(emit_csv({}, "/nonexistent-dir/x/y.csv"));
}

} // namespace
} // namespace irsfb
