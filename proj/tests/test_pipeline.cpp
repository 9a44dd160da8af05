#include <doctest.h>

#include <cstdio>
#include <sstream>
#include <sys/wait.h>

#include "curate/pipeline.hpp"
#include "test_util.hpp"

using namespace curate;
using testutil::TempDir;

namespace {

PipelineConfig desk_config(const std::filesystem::path& workspace) {
    auto cfg = load_config(testutil::source_dir() / "configs/example.ini");
    cfg.workspace = workspace;
    cfg.judge.worker_command = {testutil::mock_worker().string()};
    return cfg;
}

CurationStats run_stats(const Workspace& ws) {
    return stats_from_json(Json::parse(testutil::read_text(ws.stats_json())));
}

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(COTCURATE_PATH) + " " + args + " 2>&1";
    CliResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (auto n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
    int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::filesystem::path write_cli_config(const TempDir& dir, const std::string& name, const std::string& extra = "") {
    auto path = dir / name;
    testutil::write_text(path, "[paths]\ninputs = " +
                                   (testutil::source_dir() / "tests/fixtures/prompts5.jsonl").string() +
                                   "\nworkspace = ws\n[run]\nseed = 5\n[stub]\ncorrect = 0.6\nwrong = 0.2\nunformatted = 0.2\n"
                                   "[judge]\nworker_command = " +
                                   testutil::mock_worker().string() + "\n" + extra);
    return path;
}

}  // namespace

TEST_CASE("desk run on the five-prompt fixture") {
    TempDir dir;
    std::ostringstream log;
    Pipeline p(desk_config(dir.path()), {}, log);
    auto outcomes = p.run_all();
    CHECK(outcomes.size() == all_stages().size() - 1);  // verify-steps disabled
    for (const auto& o : outcomes) CHECK_FALSE(o.skipped);

    // 5 prompts x 10 samples with a 60/20/20 correct/wrong/unformatted stub.
    auto s = run_stats(p.workspace());
    CHECK(s.selected == 5);
    CHECK(s.sampled == 50);
    CHECK(s.sample_errors == 0);
    CHECK(s.verification_input == 50);
    CHECK(s.verified_true == 30);
    CHECK(s.verified_false == 10);
    CHECK(s.no_valid_format == 10);
    CHECK(s.filter_passed == 40);
    CHECK(s.sft_records == 30);
    CHECK(s.rl_prompts == 5);
    // Every prompt has 6 positives and 4 negatives, so each reaches the cap of 4.
    CHECK(s.dpo_pairs == 20);
    CHECK_FALSE(s.strict_verified);
    CHECK(testutil::read_text(p.workspace().stats_txt()).find("not run") != std::string::npos);

    auto sft = read_dataset(p.workspace().sft(), sft_from_json);
    auto labeled = read_records(p.workspace().labeled());
    std::map<std::string, Reward> reward_of;
    for (const auto& r : labeled) reward_of[r.key()] = *r.reward;
    for (const auto& r : sft) CHECK(reward_of.at(r.prompt_id + "#" + std::to_string(r.sample_index)) == Reward::Positive);
}

TEST_CASE("rerun skips every stage and leaves outputs untouched") {
    TempDir dir;
    std::ostringstream log;
    auto cfg = desk_config(dir.path());
    {
        Pipeline p(cfg, {}, log);
        p.run_all();
    }
    Workspace ws{dir.path()};
    auto sft = testutil::read_text(ws.sft());
    auto stamp = std::filesystem::last_write_time(ws.completions());

    Pipeline again(cfg, {}, log);
    for (const auto& o : again.run_all()) CHECK(o.skipped);
    CHECK(testutil::read_text(ws.sft()) == sft);
    CHECK(std::filesystem::last_write_time(ws.completions()) == stamp);

    // A filter change that alters verdicts reruns filter and everything downstream, not
    // sampling. Window 1 with one allowed repeat flags any repeated word.
    cfg.filters.ngram_window = 1;
    cfg.filters.max_ngram_repeats = 1;
    Pipeline changed(cfg, {}, log);
    std::map<Stage, bool> skipped;
    for (const auto& o : changed.run_all()) skipped[o.stage] = o.skipped;
    CHECK(skipped[Stage::Ingest]);
    CHECK(skipped[Stage::Sample]);
    CHECK_FALSE(skipped[Stage::Filter]);
    CHECK_FALSE(skipped[Stage::Verify]);
    CHECK_FALSE(skipped[Stage::BuildSft]);
    CHECK(std::filesystem::last_write_time(ws.completions()) == stamp);

    // A deleted output forces its stage to run again.
    std::filesystem::remove(ws.dpo());
    Pipeline repaired(cfg, {}, log);
    CHECK_FALSE(repaired.run_stage(Stage::BuildDpo).skipped);
    CHECK(std::filesystem::exists(ws.dpo()));
    CHECK(repaired.run_stage(Stage::BuildSft).skipped);

    RunOptions force;
    force.force = true;
    Pipeline forced(cfg, force, log);
    CHECK_FALSE(forced.run_stage(Stage::Ingest).skipped);
}

TEST_CASE("two runs produce byte-identical datasets") {
    TempDir a, b;
    std::ostringstream log;
    Pipeline pa(desk_config(a.path()), {}, log);
    Pipeline pb(desk_config(b.path()), {}, log);
    pa.run_all();
    pb.run_all();
    for (auto file : {"sft.jsonl", "dpo.jsonl", "rl.jsonl", "completions.jsonl", "labeled.jsonl"}) {
        CHECK_MESSAGE(testutil::read_text(a / file) == testutil::read_text(b / file), file);
    }

    TempDir c;
    auto cfg = desk_config(c.path());
    cfg.seed = 1;
    Pipeline pc(cfg, {}, log);
    pc.run_all();
    CHECK(testutil::read_text(c / "completions.jsonl") != testutil::read_text(a / "completions.jsonl"));
}

TEST_CASE("stage dependencies") {
    TempDir dir;
    std::ostringstream log;
    Pipeline p(desk_config(dir.path()), {}, log);
    CHECK_THROWS_AS(p.run_stage(Stage::Verify), StageDependencyError);
    try {
        p.run_stage(Stage::Verify);
    } catch (const StageDependencyError& e) {
        CHECK(std::string(e.what()) == "stage dependency unmet: verify needs filtered.jsonl (run filter first)");
    }
    p.run_stage(Stage::Ingest);
    CHECK_THROWS_AS(p.run_stage(Stage::Sample), StageDependencyError);
}

TEST_CASE("a failing stage keeps earlier outputs") {
    TempDir dir;
    std::ostringstream log;
    auto cfg = desk_config(dir.path());
    cfg.judge.worker_command.clear();
    Pipeline p(cfg, {}, log);
    for (auto s : {Stage::Ingest, Stage::Score, Stage::Sample, Stage::Filter}) p.run_stage(s);
    auto filtered = testutil::read_text(p.workspace().filtered());
    CHECK_THROWS(p.run_stage(Stage::Verify));
    CHECK(testutil::read_text(p.workspace().filtered()) == filtered);
    CHECK_FALSE(std::filesystem::exists(p.workspace().verified()));
    CHECK_FALSE(RunState::load(p.workspace().run_state()).marker(Stage::Verify));
    CHECK(RunState::load(p.workspace().run_state()).marker(Stage::Filter));
}

TEST_CASE("step verification with the stub critic") {
    TempDir dir;
    std::ostringstream log;
    auto cfg = desk_config(dir.path());
    cfg.steps.enabled = true;
    Pipeline p(cfg, {}, log);
    p.run_all();
    auto s = run_stats(p.workspace());
    REQUIRE(s.strict_verified);
    REQUIRE(s.loose_verified);

    // Pattern {0,1,2,3} by sample index: strict keeps index % 4 == 0, loose index % 4 <= 2.
    std::size_t strict = 0, loose = 0;
    for (const auto& r : read_dataset(p.workspace().sft(), sft_from_json)) {
        strict += r.sample_index % 4 == 0;
        loose += r.sample_index % 4 <= 2;
    }
    CHECK(*s.strict_verified == strict);
    CHECK(*s.loose_verified == loose);
    CHECK(read_records(p.workspace().step_strict()).size() == strict);

    TempDir down_dir;
    auto down_cfg = desk_config(down_dir.path());
    down_cfg.steps.enabled = true;
    ScriptedCritic down([](const CriticQuery&) -> std::string { throw CriticUnavailable("refused"); });
    Pipeline pd(down_cfg, {}, log);
    pd.set_critic(&down);
    pd.run_all();
    auto report = Json::parse(testutil::read_text(pd.workspace().step_report()));
    CHECK(report.at("skipped") == true);
    CHECK_FALSE(std::filesystem::exists(pd.workspace().step_strict()));
    CHECK_FALSE(run_stats(pd.workspace()).strict_verified);
}

TEST_CASE("run state round-trips") {
    TempDir dir;
    RunState st;
    st.set(Stage::Filter, "abc");
    st.save(dir / "rs.json");
    auto back = RunState::load(dir / "rs.json");
    CHECK(back.marker(Stage::Filter) == "abc");
    CHECK_FALSE(back.marker(Stage::Sample));
    back.clear(Stage::Filter);
    CHECK_FALSE(back.marker(Stage::Filter));
    CHECK_FALSE(RunState::load(dir / "absent.json").marker(Stage::Ingest));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    for (auto s : all_stages()) CHECK(parse_stage(to_string(s)) == s);
}

TEST_CASE("command line exit codes") {
    TempDir dir;
    auto config = write_cli_config(dir, "run.ini");

    auto ok = run_cli("--config " + config.string() + " run");
    CHECK(ok.exit_code == 0);
    CHECK(ok.output.find("[reward] 30 positive, 10 zero, 10 negative") != std::string::npos);
    auto rerun = run_cli("--config " + config.string() + " run");
    CHECK(rerun.exit_code == 0);
    CHECK(rerun.output.find("skipped") != std::string::npos);

    auto fresh = run_cli("--config " + config.string() + " --workspace " + (dir / "other").string() +
                         " run --stage verify");
    CHECK(fresh.exit_code == 1);
    CHECK(fresh.output.find("stage dependency unmet") != std::string::npos);
    CHECK(run_cli("--config " + config.string() + " --workspace " + (dir / "other").string() + " verify").exit_code == 1);

    auto bad = write_cli_config(dir, "bad.ini", "[dataset]\ndpo_cap = 0\n");
    auto cfg_err = run_cli("--config " + bad.string() + " run");
    CHECK(cfg_err.exit_code == 2);
    CHECK(cfg_err.output.find("CapMustBePositive") != std::string::npos);
    CHECK(run_cli("--config " + (dir / "absent.ini").string() + " run").exit_code == 2);

    // --seed overrides the config and changes the samples.
    auto seeded = run_cli("--config " + config.string() + " --seed 6 --workspace " + (dir / "s6").string() + " run");
    CHECK(seeded.exit_code == 0);
    CHECK(testutil::read_text(dir / "s6/completions.jsonl") != testutil::read_text(dir / "ws/completions.jsonl"));
}
