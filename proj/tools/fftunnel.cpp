// fftunnel: command-line front end.
//
//   fftunnel run <config> [--set key=value ...] [--out DIR]
//   fftunnel preset <name> [--print] [--set ...] [--out DIR]
//   fftunnel preset --list
//   fftunnel verify <config> [--set ...] [--out DIR]
//   fftunnel sweep <config-glob> [--out DIR]
//
// Exit codes: 0 success, 2 configuration error, 3 verification failure,
// 4 solver abort.

#include "fftunnel/run.hpp"

#include <CLI11.hpp>

#include <glob.h>

#include <chrono>
#include <fstream>
#include <iostream>

using namespace fftunnel;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kVerify = 3, kAbort = 4 };

void apply_overrides(ScenarioConfig& cfg, const std::vector<std::string>& sets) {
    for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + s + "'");
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.validate();
}

fs::path choose_dir(const std::string& out, const ScenarioConfig& cfg) {
    if (!out.empty())
        return out;
    return output_directory(fs::path("fftunnel-out")) / cfg.name;
}

void print_summary(const RunReport& rep, const fs::path& dir, double seconds) {
    std::cout << rep.config.name << " (" << to_string(rep.config.scenario) << ", "
              << fastforward::to_string(rep.config.scaling.profile) << ", alpha_bar " << format_number(rep.alpha_bar)
              << ")\n"
              << "  T = " << format_number(rep.T) << ", T_FF = " << format_number(rep.T_FF) << "\n"
              << "  Gamma = " << format_number(rep.gamma) << ", Gamma_FF = " << format_number(rep.gamma_ff) << "\n"
              << "  peak |E_FF| = " << format_number(rep.peak_E) << "\n";
    if (rep.verification)
        std::cout << "  verification: " << (rep.verification->passed ? "passed" : "FAILED")
                  << ", max L2 = " << format_number(rep.verification->max_l2) << "\n";
    std::cout << "  wrote " << rep.manifest.size() << " files to " << dir.string() << " in " << seconds << " s\n";
}

int run_config(ScenarioConfig cfg, const std::vector<std::string>& sets, const std::string& out) {
    apply_overrides(cfg, sets);
    const fs::path dir = choose_dir(out, cfg);
    auto start = std::chrono::steady_clock::now();
    RunReport rep = run(cfg, dir);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    print_summary(rep, dir, secs);
    if (rep.verification && !rep.verification->passed)
        return kVerify;
    return kOk;
}

int verify_config(ScenarioConfig cfg, const std::vector<std::string>& sets, const std::string& out) {
    apply_overrides(cfg, sets);
    VerificationReport rep = verify_fastforward(cfg);
    const fs::path dir = choose_dir(out, cfg);
    fs::create_directories(dir);
    std::ofstream(dir / "verification.json") << rep.to_json() << "\n";
    std::cout << cfg.name << ": " << (rep.passed ? "passed" : "FAILED") << " (max L2 " << format_number(rep.max_l2)
              << ", current ratio " << format_number(rep.max_current_ratio_error) << ", energy ratio "
              << format_number(rep.max_energy_ratio_error) << ", norm drift " << format_number(rep.norm_drift)
              << ", " << rep.runtime_seconds << " s)\n";
    for (const auto& f : rep.failures)
        std::cout << "  " << f << "\n";
    return rep.passed ? kOk : kVerify;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
    glob_t g{};
    std::vector<std::string> out;
    if (::glob(pattern.c_str(), 0, nullptr, &g) == 0)
        for (std::size_t i = 0; i < g.gl_pathc; ++i)
            out.emplace_back(g.gl_pathv[i]);
    ::globfree(&g);
    return out;
}

template <class F>
int guarded(F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const SolverAbort& e) {
        std::cerr << "solver abort: " << e.what() << "\n";
        return kAbort;
    } catch (const DegenerateFieldError& e) {
        std::cerr << "solver abort: " << e.what() << "\n";
        return kAbort;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fast-forward tunneling experiments"};
    app.require_subcommand(1);

    std::string config, name, pattern, out;
    std::vector<std::string> sets;
    bool list = false, print = false;

    auto* run_cmd = app.add_subcommand("run", "run a scenario configuration file");
    run_cmd->add_option("config", config, "configuration file")->required();
    run_cmd->add_option("--set", sets, "override key=value");
    run_cmd->add_option("--out", out, "output directory");

    auto* preset_cmd = app.add_subcommand("preset", "run a named preset (fig1 .. fig9)");
    preset_cmd->add_option("name", name, "preset name");
    preset_cmd->add_flag("--list", list, "list presets");
    preset_cmd->add_flag("--print", print, "print the preset configuration and exit");
    preset_cmd->add_option("--set", sets, "override key=value");
    preset_cmd->add_option("--out", out, "output directory");

    auto* verify_cmd = app.add_subcommand("verify", "propagate under the synthesized fields and compare");
    verify_cmd->add_option("config", config, "configuration file")->required();
    verify_cmd->add_option("--set", sets, "override key=value");
    verify_cmd->add_option("--out", out, "output directory");

    auto* sweep_cmd = app.add_subcommand("sweep", "run every configuration matching a glob");
    sweep_cmd->add_option("pattern", pattern, "configuration glob")->required();
    sweep_cmd->add_option("--out", out, "parent output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    if (*run_cmd)
        return guarded([&] { return run_config(load_config(config), sets, out); });

    if (*verify_cmd)
        return guarded([&] { return verify_config(load_config(config), sets, out); });

    if (*preset_cmd) {
        return guarded([&] {
            if (list) {
                for (const auto& p : presets())
                    std::cout << p.name << "\n";
                return static_cast<int>(kOk);
            }
            if (name.empty())
                throw ConfigError("preset: a name is required (see --list)");
            ScenarioConfig cfg = preset(name);
            if (print) {
                apply_overrides(cfg, sets);
                std::cout << to_text(cfg);
                return static_cast<int>(kOk);
            }
            return run_config(cfg, sets, out);
        });
    }

    if (*sweep_cmd) {
        auto files = expand_glob(pattern);
        if (files.empty()) {
            std::cerr << "configuration error: no files match '" << pattern << "'\n";
            return kConfig;
        }
        int worst = kOk;
        for (const auto& f : files) {
            int rc = guarded([&] {
                ScenarioConfig cfg = load_config(f);
                std::string dir = out.empty() ? std::string() : (fs::path(out) / cfg.name).string();
                return run_config(cfg, {}, dir);
            });
            worst = std::max(worst, rc);
        }
        return worst;
    }
    return kOk;
}
