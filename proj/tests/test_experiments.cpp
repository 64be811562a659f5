// =============================================================================
// Experiment orchestration tests
// =============================================================================
//
// Preset construction and locks, config validation, graph materialization
// (including the seeded perturbation stream), per-trial initial states, the
// detector-mode mapping, and the Monte Carlo driver's determinism guarantees:
// derived trial seeds, worker-count independence, and reproducible aggregates.
//
// =============================================================================

#include "doctest.h"

#include "boomerang/experiments.hpp"
#include "boomerang/io.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

using namespace boomerang;

namespace {

// small fast configs so the whole file stays in the sub-second range
ExperimentConfig quick(Preset p, double a) {
    ExperimentConfig cfg = make_preset(p, a);
    cfg.trials = 4;
    cfg.horizon = 20000;
    cfg.seed = 1234;
    return cfg;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/boomerang_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

// =============================================================================
// Presets
// =============================================================================

TEST_CASE("preset names round-trip") {
    for (Preset p : {Preset::fig1, Preset::fig2, Preset::fig3, Preset::fluct_lemma}) {
        CHECK(preset_from_name(preset_name(p)) == p);
    }
    CHECK(preset_from_name("none") == Preset::none);
    CHECK_THROWS_AS(preset_from_name("fig9"), Error);
    try {
        preset_from_name("bogus");
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_preset);
    }
}

TEST_CASE("fig1: two factions of 5 and 7, no flips, uniform init") {
    const ExperimentConfig cfg = make_preset(Preset::fig1, 0.5);
    CHECK(cfg.preset == Preset::fig1);
    CHECK(cfg.faction_sizes == std::vector<int>{5, 7});
    CHECK(cfg.flip_count == 0);
    CHECK(cfg.init == InitRule::uniform_random);
    CHECK(cfg.horizon == 200000);
    CHECK(cfg.trials == 100);
    CHECK(cfg.self_weight == 0.5);
    CHECK(cfg.o_min == 0.0);
    CHECK(cfg.o_max == 1.0);
    CHECK_FALSE(cfg.seed.has_value());
}

TEST_CASE("fig2: three factions of 3, 4 and 5") {
    const ExperimentConfig cfg = make_preset(Preset::fig2, 0.25);
    CHECK(cfg.faction_sizes == std::vector<int>{3, 4, 5});
    CHECK(cfg.self_weight == 0.25);
    CHECK(cfg.flip_count == 0);
}

TEST_CASE("fig3: the two-faction graph with three sign flips") {
    const ExperimentConfig cfg = make_preset(Preset::fig3, 0.5);
    CHECK(cfg.faction_sizes == std::vector<int>{5, 7});
    CHECK(cfg.flip_count == 3);
}

TEST_CASE("fluct_lemma: pinned init, long horizon, 20 trials") {
    const ExperimentConfig cfg = make_preset(Preset::fluct_lemma, 0.5);
    CHECK(cfg.faction_sizes == std::vector<int>{3, 4, 5});
    CHECK(cfg.init == InitRule::pinned);
    CHECK(cfg.horizon == 1000000);
    CHECK(cfg.trials == 20);
    CHECK(cfg.record_stride == 1);
}

TEST_CASE("make_preset validates the self-weight") {
    CHECK_THROWS_AS(make_preset(Preset::fig1, 0.0), Error);
    CHECK_THROWS_AS(make_preset(Preset::fig1, 1.0), Error);
    CHECK_THROWS_AS(make_preset(Preset::fig1, -0.5), Error);
    try {
        make_preset(Preset::fig1, 1.5);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::invalid_weight);
    }
}

TEST_CASE("'none' is a parseable name but not a runnable preset") {
    CHECK_THROWS_AS(make_preset(Preset::none, 0.5), Error);
    CHECK_THROWS_AS(make_preset("none", 0.5), Error);
}

// =============================================================================
// Config validation
// =============================================================================

TEST_CASE("custom configs need exactly one graph source") {
    ExperimentConfig cfg;
    cfg.trials = 1;
    cfg.seed = 1;
    CHECK_THROWS_AS(validate_experiment_config(cfg), Error);  // neither
    cfg.faction_sizes = {2, 3};
    CHECK_NOTHROW(validate_experiment_config(cfg));
    cfg.graph_file = "some.graph";
    CHECK_THROWS_AS(validate_experiment_config(cfg), Error);  // both
}

TEST_CASE("figure presets own their graph shape and perturbation count") {
    ExperimentConfig cfg = make_preset(Preset::fig1, 0.5);
    cfg.seed = 1;
    CHECK_NOTHROW(validate_experiment_config(cfg));

    ExperimentConfig wrong_sizes = cfg;
    wrong_sizes.faction_sizes = {4, 8};
    CHECK_THROWS_AS(validate_experiment_config(wrong_sizes), Error);

    ExperimentConfig wrong_flips = cfg;
    wrong_flips.flip_count = 2;
    CHECK_THROWS_AS(validate_experiment_config(wrong_flips), Error);

    ExperimentConfig wrong_init = cfg;
    wrong_init.init = InitRule::pinned;
    CHECK_THROWS_AS(validate_experiment_config(wrong_init), Error);

    ExperimentConfig file_graph = cfg;
    file_graph.graph_file = "other.graph";
    CHECK_THROWS_AS(validate_experiment_config(file_graph), Error);

    ExperimentConfig fig3 = make_preset(Preset::fig3, 0.5);
    fig3.seed = 1;
    CHECK_NOTHROW(validate_experiment_config(fig3));
    fig3.flip_count = 0;
    CHECK_THROWS_AS(validate_experiment_config(fig3), Error);
}

TEST_CASE("the fluctuation preset accepts custom sizes with exactly three factions") {
    ExperimentConfig cfg = make_preset(Preset::fluct_lemma, 0.5);
    cfg.seed = 1;
    cfg.faction_sizes = {2, 2, 4};
    CHECK_NOTHROW(validate_experiment_config(cfg));
    cfg.faction_sizes = {2, 2};
    CHECK_THROWS_AS(validate_experiment_config(cfg), Error);
    cfg.faction_sizes = {2, 2, 2, 2};
    CHECK_THROWS_AS(validate_experiment_config(cfg), Error);
}

TEST_CASE("run-length knobs are range-checked") {
    ExperimentConfig cfg = make_preset(Preset::fig1, 0.5);
    cfg.seed = 1;
    auto broken = [&](auto mutate) {
        ExperimentConfig c = cfg;
        mutate(c);
        CHECK_THROWS_AS(validate_experiment_config(c), Error);
    };
    broken([](ExperimentConfig& c) { c.trials = 0; });
    broken([](ExperimentConfig& c) { c.horizon = -1; });
    broken([](ExperimentConfig& c) { c.record_stride = 0; });
    broken([](ExperimentConfig& c) { c.tol = 0.0; });
    broken([](ExperimentConfig& c) { c.epsilon = 0.0; });
    broken([](ExperimentConfig& c) { c.epsilon = 0.5; });  // >= range/2
    broken([](ExperimentConfig& c) { c.flip_count = -1; });
    broken([](ExperimentConfig& c) { c.o_min = c.o_max; });
    broken([](ExperimentConfig& c) { c.self_weight = 1.0; });
}

// =============================================================================
// Materialization
// =============================================================================

TEST_CASE("fig1 materializes the complete 5+7 graph") {
    ExperimentConfig cfg = make_preset(Preset::fig1, 0.5);
    cfg.seed = 9;
    const MaterializedExperiment m = materialize(cfg);
    CHECK(m.graph.vertex_count() == 12);
    CHECK(m.graph.is_complete());
    CHECK(m.partition.block_count() == 2);
    CHECK(m.partition.blocks[0].size() == 5);
    CHECK(m.partition.blocks[1].size() == 7);
    CHECK(m.flipped_edges.empty());
    CHECK(m.params.self_weights == std::vector<double>(12, 0.5));
    CHECK(m.dist.size() == 66);
}

TEST_CASE("fig3 flips exactly three edges, deterministically per seed") {
    ExperimentConfig cfg = make_preset(Preset::fig3, 0.5);
    cfg.seed = 31337;
    const MaterializedExperiment m1 = materialize(cfg);
    const MaterializedExperiment m2 = materialize(cfg);
    REQUIRE(m1.flipped_edges.size() == 3);
    CHECK(m1.flipped_edges == m2.flipped_edges);
    CHECK(m1.graph.edges() == m2.graph.edges());
    // flipped edges differ from the clean clustered graph
    const auto [clean, cp] = generate_complete_clustered({5, 7});
    int changed = 0;
    for (int k = 0; k < clean.edge_count(); ++k)
        if (m1.graph.edges()[k].sign != clean.edges()[k].sign) ++changed;
    CHECK(changed == 3);

    cfg.seed = 31338;
    const MaterializedExperiment m3 = materialize(cfg);
    CHECK(m1.flipped_edges != m3.flipped_edges);  // for this seed pair
}

TEST_CASE("sign flips without a master seed are rejected") {
    ExperimentConfig cfg = make_preset(Preset::fig3, 0.5);
    cfg.seed.reset();
    CHECK_THROWS_AS(materialize(cfg), Error);
}

TEST_CASE("materialize loads custom graphs from disk") {
    TempFile tmp("materialize.graph");
    write_text_file(tmp.path, "n 3\n0 1 +1\n0 2 -1\n1 2 -1\n");
    ExperimentConfig cfg;
    cfg.graph_file = tmp.path;
    cfg.trials = 1;
    cfg.seed = 1;
    const MaterializedExperiment m = materialize(cfg);
    CHECK(m.graph.vertex_count() == 3);
    CHECK(m.partition.block_count() == 2);
}

TEST_CASE("per-agent weights override the uniform weight") {
    ExperimentConfig cfg;
    cfg.faction_sizes = {2, 2};
    cfg.trials = 1;
    cfg.seed = 1;
    cfg.self_weights = {0.1, 0.2, 0.3, 0.4};
    const MaterializedExperiment m = materialize(cfg);
    CHECK(m.params.self_weights == cfg.self_weights);
    cfg.self_weights = {0.1, 0.2};  // wrong length
    CHECK_THROWS_AS(materialize(cfg), Error);
}

// =============================================================================
// Initial states
// =============================================================================

TEST_CASE("uniform init fills every agent from the interval") {
    ExperimentConfig cfg;
    cfg.faction_sizes = {2, 3};
    cfg.o_min = -1.0;
    cfg.o_max = 2.0;
    cfg.seed = 1;
    const MaterializedExperiment m = materialize(cfg);
    Rng rng(55);
    const std::vector<double> x0 = initial_state(cfg, m.partition, m.params, rng);
    REQUIRE(x0.size() == 5);
    for (double v : x0) {
        CHECK(v >= -1.0);
        CHECK(v < 2.0);
    }
    // deterministic per stream
    Rng rng2(55);
    CHECK(initial_state(cfg, m.partition, m.params, rng2) == x0);
}

TEST_CASE("pinned init holds the first two factions at the bounds") {
    ExperimentConfig cfg = make_preset(Preset::fluct_lemma, 0.5);
    cfg.seed = 1;
    const MaterializedExperiment m = materialize(cfg);
    Rng rng(77);
    const std::vector<double> x0 = initial_state(cfg, m.partition, m.params, rng);
    REQUIRE(x0.size() == 12);
    for (int v : m.partition.blocks[0]) CHECK(x0[static_cast<std::size_t>(v)] == 0.0);
    for (int v : m.partition.blocks[1]) CHECK(x0[static_cast<std::size_t>(v)] == 1.0);
    for (int v : m.partition.blocks[2]) {
        CHECK(x0[static_cast<std::size_t>(v)] > 0.0);  // strictly interior
        CHECK(x0[static_cast<std::size_t>(v)] < 1.0);
    }
}

TEST_CASE("pinned agents consume no draws from the stream") {
    // with the same stream, the interior agents of a pinned init must match
    // the first draws of a fresh stream
    ExperimentConfig cfg = make_preset(Preset::fluct_lemma, 0.5);
    cfg.seed = 1;
    const MaterializedExperiment m = materialize(cfg);
    Rng rng(99);
    const std::vector<double> x0 = initial_state(cfg, m.partition, m.params, rng);
    Rng fresh(99);
    for (int v : m.partition.blocks[2]) {
        CHECK(x0[static_cast<std::size_t>(v)] == fresh.next_in(0.0, 1.0));
    }
}

TEST_CASE("pinned init requires at least two factions") {
    ExperimentConfig cfg;
    cfg.faction_sizes = {4};
    cfg.init = InitRule::pinned;
    cfg.seed = 1;
    const MaterializedExperiment m = materialize(cfg);
    Rng rng(3);
    try {
        initial_state(cfg, m.partition, m.params, rng);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::wrong_faction_count);
    }
}

// =============================================================================
// Detector modes
// =============================================================================

TEST_CASE("presets pick their detector, custom configs go by faction count") {
    auto mode_of = [](ExperimentConfig cfg) {
        cfg.seed = 1;
        const MaterializedExperiment m = materialize(cfg);
        return detector_mode(cfg, m.partition);
    };
    CHECK(mode_of(make_preset(Preset::fig1, 0.5)) == DetectorMode::polarization);
    CHECK(mode_of(make_preset(Preset::fig2, 0.5)) == DetectorMode::multi_faction);
    CHECK(mode_of(make_preset(Preset::fig3, 0.5)) == DetectorMode::perturbed);
    CHECK(mode_of(make_preset(Preset::fluct_lemma, 0.5)) == DetectorMode::fluctuation);

    ExperimentConfig one;
    one.faction_sizes = {8};
    CHECK(mode_of(one) == DetectorMode::consensus);
    ExperimentConfig two;
    two.faction_sizes = {3, 3};
    CHECK(mode_of(two) == DetectorMode::polarization);
    ExperimentConfig many;
    many.faction_sizes = {2, 2, 2};
    CHECK(mode_of(many) == DetectorMode::multi_faction);
}

TEST_CASE("detector mode names are stable identifiers") {
    CHECK(std::string(detector_mode_name(DetectorMode::consensus)) == "consensus");
    CHECK(std::string(detector_mode_name(DetectorMode::polarization)) == "polarization");
    CHECK(std::string(detector_mode_name(DetectorMode::multi_faction)) == "multi_faction");
    CHECK(std::string(detector_mode_name(DetectorMode::perturbed)) == "perturbed");
    CHECK(std::string(detector_mode_name(DetectorMode::fluctuation)) == "fluctuation");
}

// =============================================================================
// Monte Carlo driver
// =============================================================================

TEST_CASE("run_monte_carlo requires a master seed") {
    ExperimentConfig cfg = make_preset(Preset::fig1, 0.5);
    cfg.trials = 1;
    cfg.horizon = 10;
    CHECK_THROWS_AS(run_monte_carlo(cfg), Error);
}

TEST_CASE("trial seeds are derived, distinct, and recorded") {
    const ExperimentConfig cfg = quick(Preset::fig1, 0.5);
    const ExperimentSummary s = run_monte_carlo(cfg, 1);
    REQUIRE(s.trials.size() == 4);
    std::set<std::uint64_t> seeds;
    for (const TrialSummary& t : s.trials) {
        CHECK(t.seed == derive_seed(*cfg.seed, static_cast<std::uint64_t>(t.trial)));
        seeds.insert(t.seed);
    }
    CHECK(seeds.size() == 4);
    CHECK(s.trials[0].trial == 0);
    CHECK(s.trials[3].trial == 3);
}

TEST_CASE("worker count does not change the results") {
    const ExperimentConfig cfg = quick(Preset::fig1, 0.5);
    const ExperimentSummary s1 = run_monte_carlo(cfg, 1);
    const ExperimentSummary s2 = run_monte_carlo(cfg, 3);
    const ExperimentSummary s3 = run_monte_carlo(cfg, 0);  // machine default
    REQUIRE(s1.trials.size() == s2.trials.size());
    for (std::size_t k = 0; k < s1.trials.size(); ++k) {
        CHECK(s1.trials[k].seed == s2.trials[k].seed);
        CHECK(s1.trials[k].final_spread == s2.trials[k].final_spread);
        CHECK(s1.trials[k].final_spread == s3.trials[k].final_spread);
        CHECK(s1.trials[k].polarization->polarized == s2.trials[k].polarization->polarized);
    }
}

TEST_CASE("reruns of the same config are identical") {
    const ExperimentConfig cfg = quick(Preset::fig2, 0.5);
    const ExperimentSummary s1 = run_monte_carlo(cfg, 2);
    const ExperimentSummary s2 = run_monte_carlo(cfg, 2);
    REQUIRE(s1.trials.size() == s2.trials.size());
    for (std::size_t k = 0; k < s1.trials.size(); ++k) {
        CHECK(s1.trials[k].final_spread == s2.trials[k].final_spread);
        CHECK(s1.trials[k].factions_at_bounds == s2.trials[k].factions_at_bounds);
    }
}

TEST_CASE("polarization mode fills verdicts, audits, and hit quantiles") {
    ExperimentConfig cfg = quick(Preset::fig1, 0.5);
    cfg.trials = 6;
    cfg.horizon = 100000;  // enough for 12 agents to lock in
    const ExperimentSummary s = run_monte_carlo(cfg);
    CHECK(s.mode == DetectorMode::polarization);
    REQUIRE(s.aggregate.fraction_polarized.has_value());
    for (const TrialSummary& t : s.trials) {
        REQUIRE(t.polarization.has_value());
        CHECK(t.absorbing_ok.has_value());
        CHECK(t.monotone_ok.has_value());
        CHECK_FALSE(t.consensus.has_value());
    }
    if (*s.aggregate.fraction_polarized == 1.0) {
        REQUIRE(s.aggregate.hit_median.has_value());
        CHECK(*s.aggregate.hit_p10 <= *s.aggregate.hit_median);
        CHECK(*s.aggregate.hit_median <= *s.aggregate.hit_p90);
    }
}

TEST_CASE("a single trial aggregates to itself") {
    ExperimentConfig cfg;
    cfg.faction_sizes = {8};
    cfg.trials = 1;
    cfg.horizon = 100000;
    cfg.tol = 1e-6;
    cfg.seed = 4242;
    const ExperimentSummary s = run_monte_carlo(cfg, 1);
    CHECK(s.mode == DetectorMode::consensus);
    REQUIRE(s.trials.size() == 1);
    REQUIRE(s.trials[0].consensus.has_value());
    const bool converged = s.trials[0].consensus->converged;
    REQUIRE(s.aggregate.fraction_converged.has_value());
    CHECK(*s.aggregate.fraction_converged == (converged ? 1.0 : 0.0));
    if (converged) {
        REQUIRE(s.aggregate.consensus_values.size() == 1);
        CHECK(s.aggregate.consensus_values[0] == *s.trials[0].consensus->value);
        CHECK(*s.aggregate.hit_p10 == *s.aggregate.hit_median);
        CHECK(*s.aggregate.hit_median == *s.aggregate.hit_p90);
    }
}

TEST_CASE("fluctuation mode reports band minima and the pinned audit") {
    ExperimentConfig cfg = make_preset(Preset::fluct_lemma, 0.5);
    cfg.trials = 2;
    cfg.horizon = 50000;
    cfg.seed = 777;
    cfg.record_stride = 1;
    const ExperimentSummary s = run_monte_carlo(cfg);
    CHECK(s.mode == DetectorMode::fluctuation);
    for (const TrialSummary& t : s.trials) {
        REQUIRE(t.min_visits_low.has_value());
        REQUIRE(t.min_visits_high.has_value());
        REQUIRE(t.min_crossings.has_value());
        REQUIRE(t.pinned_constant.has_value());
        CHECK(*t.pinned_constant);  // bounds are absorbing for pinned factions
    }
    REQUIRE(s.aggregate.all_pinned_constant.has_value());
    CHECK(*s.aggregate.all_pinned_constant);
    REQUIRE(s.aggregate.min_visits_low.has_value());
    CHECK(*s.aggregate.min_visits_low ==
          std::min(*s.trials[0].min_visits_low, *s.trials[1].min_visits_low));
}

TEST_CASE("multi-faction mode tracks bound occupation per faction") {
    ExperimentConfig cfg = quick(Preset::fig2, 0.5);
    cfg.horizon = 100000;
    const ExperimentSummary s = run_monte_carlo(cfg);
    CHECK(s.mode == DetectorMode::multi_faction);
    REQUIRE(s.aggregate.two_polarized_fraction.has_value());
    for (const TrialSummary& t : s.trials) {
        REQUIRE(t.factions_at_bounds.has_value());
        REQUIRE(t.two_polarized_one_fluctuating.has_value());
        CHECK(*t.factions_at_bounds >= 0);
        CHECK(*t.factions_at_bounds <= 3);
        if (*t.two_polarized_one_fluctuating) {
            REQUIRE(t.min_center_occupancy.has_value());
            CHECK(*t.min_center_occupancy > 0.0);
        }
    }
}

TEST_CASE("perturbed mode reports mean extreme-band occupancy") {
    ExperimentConfig cfg = quick(Preset::fig3, 0.5);
    const ExperimentSummary s = run_monte_carlo(cfg);
    CHECK(s.mode == DetectorMode::perturbed);
    CHECK(s.flipped_edges.size() == 3);
    for (const TrialSummary& t : s.trials) {
        REQUIRE(t.extreme_occupancy_mean.has_value());
        CHECK(*t.extreme_occupancy_mean >= 0.0);
        CHECK(*t.extreme_occupancy_mean <= 1.0);
    }
    REQUIRE(s.aggregate.mean_extreme_occupancy.has_value());
}

// =============================================================================
// Consensus value sampling
// =============================================================================

TEST_CASE("consensus samples collect one value per converged trial") {
    ExperimentConfig cfg;
    cfg.faction_sizes = {8};
    cfg.trials = 8;
    cfg.horizon = 100000;
    cfg.tol = 1e-6;
    cfg.seed = 60601;
    const ConsensusSamples s = consensus_value_samples(cfg);
    CHECK(s.all_converged);
    CHECK(s.all_in_hull);
    REQUIRE(s.values.size() == 8);
    for (double v : s.values) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    // the consensus value is random: different trials land on different values
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    CHECK(*hi - *lo > 1e-6);
}

TEST_CASE("consensus sampling refuses multi-faction graphs") {
    ExperimentConfig cfg;
    cfg.faction_sizes = {3, 3};
    cfg.trials = 2;
    cfg.seed = 5;
    try {
        consensus_value_samples(cfg);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::not_single_faction);
        CHECK(e.kind() == ErrorKind::model);
    }
}
