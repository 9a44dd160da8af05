#include <doctest.h>

#include <algorithm>

#include "curate/config.hpp"
#include "test_util.hpp"

using namespace curate;
using testutil::TempDir;

namespace {

bool has_code(const std::vector<std::string>& violations, std::string_view code) {
    return std::any_of(violations.begin(), violations.end(), [&](const std::string& v) { return v.starts_with(code); });
}

std::string fixture() { return (testutil::source_dir() / "tests/fixtures/prompts5.jsonl").string(); }

// Minimal valid config; `extra` is appended so later sections and keys can override.
std::filesystem::path write_config(const TempDir& dir, const std::string& extra, const std::string& backend = "kind = stub") {
    auto path = dir / "run.ini";
    testutil::write_text(path, "[paths]\ninputs = " + fixture() + "\nworkspace = ws\n\n[backend]\n" + backend + "\n" + extra);
    return path;
}

}  // namespace

TEST_CASE("bundled example config is valid") {
    auto path = testutil::source_dir() / "configs/example.ini";
    CHECK(validate_config(path).empty());
    auto cfg = load_config(path);
    REQUIRE(cfg.inputs.size() == 1);
    CHECK(cfg.inputs[0].path.is_absolute());
    CHECK(std::filesystem::exists(cfg.inputs[0].path));
    CHECK(cfg.seed == 20250101);
    CHECK(cfg.backend.kind == BackendKind::Stub);
    CHECK(cfg.sampling.n_samples == 10);
    CHECK(cfg.budget.domain_base_samples.at(Domain::Geo) == 8);
    CHECK(cfg.filters.reflective_markers.size() == 5);
    CHECK(cfg.dpo_cap == 4);
    CHECK_FALSE(cfg.steps.enabled);
    CHECK(cfg.steps.stub_pattern == std::vector{0, 1, 2, 3});
}

TEST_CASE("violations") {
    TempDir dir;
    CHECK(validate_config(write_config(dir, "")).empty());

    auto cap = validate_config(write_config(dir, "[dataset]\ndpo_cap = 0\n"));
    REQUIRE(cap.size() == 1);
    CHECK(has_code(cap, "CapMustBePositive"));

    auto http = validate_config(write_config(dir, "", "kind = http\nmodel = m"));
    CHECK(has_code(http, "MissingBackendUrl"));
    // The backend is only needed when sampling runs.
    CHECK(validate_config(load_config(write_config(dir, "", "kind = http\nmodel = m")), false).empty());

    CHECK(has_code(validate_config(write_config(dir, "[dataset]\nrl_fraction = 1.5\n")), "FractionOutOfRange"));
    CHECK(has_code(validate_config(write_config(dir, "[difficulty]\nmin_level = 11\n")), "LevelOutOfRange"));
    CHECK(has_code(validate_config(write_config(dir, "[difficulty]\nscorer = remote\n")), "RemoteScorerNeedsHttp"));
    CHECK(has_code(validate_config(write_config(dir, "[stub]\ncorrect = 0.9\nwrong = 0.9\n")), "InvalidStubMix"));
    CHECK(has_code(validate_config(write_config(dir, "[filters]\nmax_foreign_char_ratio = 2\n")), "InvalidFilters"));
    CHECK(has_code(validate_config(write_config(dir, "[judge]\npool_size = 0\n")), "PoolMustBePositive"));
    CHECK(has_code(validate_config(write_config(dir, "[step_verification]\nenabled = true\ncritic = http\n")),
                   "MissingCriticUrl"));

    // Several problems are all reported.
    auto many = validate_config(write_config(dir, "[dataset]\ndpo_cap = 0\n[difficulty]\nmin_level = 0\n"));
    CHECK(many.size() == 2);
}

TEST_CASE("load errors") {
    TempDir dir;
    CHECK(has_code(validate_config(dir / "absent.ini"), "Unreadable"));
    CHECK(has_code(validate_config(write_config(dir, "[filters]\nngram_windw = 3\n")), "UnknownKey"));
    CHECK(has_code(validate_config(write_config(dir, "[sampling]\nn_samples = many\n")), "BadValue"));
    CHECK(has_code(validate_config(write_config(dir, "[dataset]\nrl_count = 3\nrl_fraction = 0.5\n")), "Conflict"));
    CHECK_THROWS_AS(load_config(write_config(dir, "[bogus]\nx = 1\n")), ConfigLoadError);

    auto missing = dir / "m.ini";
    testutil::write_text(missing, "[paths]\ninputs = nowhere.jsonl\n");
    CHECK(has_code(validate_config(missing), "InputNotFound"));
}

TEST_CASE("value parsing") {
    TempDir dir;
    auto path = write_config(dir,
                             "[budget]\nmode = monotone\nmultipliers = 7:1, 8:2, 9:3\n"
                             "[dataset]\nrl_count = 3\n"
                             "[sampling]\nsystem_template = Think.\\nThen answer.\n"
                             "[run]\nseed = 99\n");
    auto cfg = load_config(path);
    CHECK(cfg.workspace == dir.path() / "ws");
    CHECK(cfg.budget.mode == BudgetMode::MonotoneByLevel);
    CHECK(cfg.budget.level_multipliers.at(9) == 3);
    CHECK(std::get<RlCount>(cfg.rl).n == 3);
    CHECK(cfg.sampling.system_template == "Think.\nThen answer.");
    CHECK(cfg.seed == 99);

    auto tagged = dir / "t.ini";
    testutil::write_text(tagged, "[paths]\ninputs = math:" + fixture() + ", " + fixture() + "\n");
    auto t = load_config(tagged);
    REQUIRE(t.inputs.size() == 2);
    CHECK(t.inputs[0].domain == Domain::Math);
    CHECK_FALSE(t.inputs[1].domain);
}
