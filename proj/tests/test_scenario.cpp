#include "properties.hpp"

#include "fftunnel/run.hpp"

#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <fstream>

using namespace fftunnel;

TEST_CASE("configuration text round trip") {
    auto cfg = preset("fig7");
    auto back = parse_config(to_text(cfg));
    CHECK(to_text(back) == to_text(cfg));
    CHECK(back.physics.V0 == 30.0);
}

TEST_CASE("configuration errors name the key") {
    try {
        parse_config("physics.bogus = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("physics.bogus") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("physics.k = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("scaling.alpha_bar = 0.5\n").validate(), ConfigError);
    CHECK_THROWS_AS(parse_config("numerics.n = 100\n").validate(), ConfigError);
    auto c = parse_config("# comment\nphysics.k = 3 # trailing\n");
    CHECK(c.physics.k == 3.0);
    CHECK_THROWS_AS(load_config("/nonexistent/config.cfg"), ConfigError);
}

TEST_CASE("presets carry the figure parameters") {
    std::vector<std::string> names;
    for (const auto& p : presets()) {
        names.push_back(p.name);
        CHECK_NOTHROW(p.validate());
    }
    for (const char* n : {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"})
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    auto f2 = preset("fig2");
    CHECK(f2.physics.x0 == 2.0);
    CHECK(f2.physics.k == 2.0);
    CHECK(f2.physics.beta == 1.0);
    CHECK(f2.physics.V0 == 1.0);
    CHECK(f2.scaling.alpha_bar == 5.0);
    CHECK(f2.scaling.T == 5.0);
    auto f5 = preset("fig5");
    CHECK(f5.scenario == ScenarioKind::Shutter);
    CHECK(f5.scaling.T == 25.0);
    auto f7 = preset("fig7");
    CHECK(f7.scenario == ScenarioKind::Soliton);
    CHECK(f7.physics.V0 == 30.0);
    CHECK(f7.physics.v == 2.25);
    CHECK(f7.physics.x0 == 6.0);
    CHECK(f7.scaling.alpha_bar == 5.0);
    CHECK(f7.scaling.profile == fastforward::Profile::Uniform);
    auto f8 = preset("fig8");
    CHECK(f8.physics.V0 == 50.0);
    CHECK(f8.scaling.alpha_bar == 2500.0);
    CHECK_THROWS_AS(preset("fig10"), ConfigError);
}

TEST_CASE("run writes a manifest of deterministic files") {
    namespace fs = std::filesystem;
    auto cfg = preset("fig4");
    cfg.outputs.map_times = 4;
    cfg.outputs.map_x_points = 21;
    cfg.numerics.trace_samples = 100;
    const fs::path dir = fs::temp_directory_path() / "fftunnel-test-run";
    fs::remove_all(dir);
    auto rep = run(cfg, dir);
    // Coarse trace: the rates agree only to the trapezoid error.
    CHECK(rep.gamma_ff / rep.gamma == doctest::Approx(5.0).epsilon(1e-2));
    for (const auto& m : rep.manifest) {
        CAPTURE(m.file);
        CHECK(fs::exists(dir / m.file));
    }
    std::ifstream f(dir / "density_ff.csv");
    std::string first, header;
    std::getline(f, first);
    std::getline(f, header);
    CHECK(first.rfind("# ", 0) == 0);
    CHECK(first.find("natural units") != std::string::npos);
    CHECK(header == "t,x,density");
    auto j = nlohmann::json::parse(props::slurp(dir / "report.json"));
    CHECK(j["name"] == "fig4");
    CHECK(j["manifest"].size() == rep.manifest.size() + 0);
    fs::remove_all(dir);
}

TEST_CASE("output directory honours the environment") {
    ::setenv("FFTUNNEL_OUTPUT_DIR", "/tmp/elsewhere", 1);
    CHECK(output_directory("fallback") == std::filesystem::path("/tmp/elsewhere"));
    ::unsetenv("FFTUNNEL_OUTPUT_DIR");
    CHECK(output_directory("fallback") == std::filesystem::path("fallback"));
}

TEST_CASE("format_number") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(NAN) == "nan");
}

#ifdef FFTUNNEL_CLI
TEST_CASE("command line outputs are deterministic") {
    CHECK(props::cli_differences(FFTUNNEL_CLI, std::filesystem::temp_directory_path() / "fftunnel-cli-test") == 0);
}

TEST_CASE("command line exit codes") {
    const std::string cli = FFTUNNEL_CLI;
    auto rc = [&](const std::string& args) {
        int s = std::system(("\"" + cli + "\" " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    CHECK(rc("preset --list") == 0);
    CHECK(rc("preset fig10") == 2);
    CHECK(rc("run /nonexistent.cfg") == 2);
    CHECK(rc("preset fig1 --set numerics.dt=1 --print") == 2);
    CHECK(rc("frobnicate") == 2);
}
#endif
