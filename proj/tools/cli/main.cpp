#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "builtins.hpp"
#include "config.hpp"
#include "mmlab/error.hpp"
#include "mmlab/parallel.hpp"
#include "runner.hpp"

namespace {

using mmlab::cli::RunConfig;
using nlohmann::json;

struct Flags {
    std::string config;
    std::string builtin;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<double> r;
    std::optional<double> r_from;
    std::optional<double> r_to;
    std::optional<std::size_t> steps;
    std::size_t threads = 0;
    bool quiet = false;
};

void add_run_options(CLI::App* sub, Flags& f) {
    auto* src = sub->add_option_group("source");
    src->add_option("--config", f.config, "JSON run configuration");
    src->add_option("--builtin", f.builtin, "builtin fixture name (see `mmlab builtins`)");
    src->require_option(1);
    sub->add_option("--out", f.out, "also write the report to this file");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--samples", f.samples, "number of random samples");
    sub->add_option("--r", f.r, "constraint level");
    sub->add_option("--r-from", f.r_from, "first r of a scan");
    sub->add_option("--r-to", f.r_to, "last r of a scan");
    sub->add_option("--steps", f.steps, "number of scan points");
    sub->add_option("--threads", f.threads, "worker thread cap (0 = hardware concurrency)");
    sub->add_flag("--quiet", f.quiet, "do not print the report on stdout");
}

int emit(const json& report, const std::string& path, bool quiet) {
    const std::string text = report.dump(2) + "\n";
    if (!path.empty()) {
        std::ofstream out(path, std::ios::binary);
        if (!out || !(out << text)) {
            std::cerr << "mmlab: cannot write " << path << "\n";
            return 1;
        }
    }
    if (!quiet) std::cout << text;
    return 0;
}

int execute(const std::string& command, const Flags& f) {
    RunConfig cfg;
    try {
        cfg = f.config.empty() ? mmlab::cli::builtin_config(f.builtin) : mmlab::cli::load_config(f.config);
    } catch (const mmlab::Error& e) {
        emit(mmlab::cli::error_report(command, std::string(mmlab::to_string(e.kind())), e.what(), e.context()), f.out,
             f.quiet);
        return 1;
    }
    cfg.command = command;
    if (f.seed) cfg.params["seed"] = *f.seed;
    if (f.samples) cfg.params["samples"] = *f.samples;
    if (f.r) cfg.params["r"] = *f.r;
    if (f.r_from) cfg.params["r_from"] = *f.r_from;
    if (f.r_to) cfg.params["r_to"] = *f.r_to;
    if (f.steps) cfg.params["steps"] = *f.steps;
    mmlab::set_max_threads(f.threads ? f.threads : std::max(1u, std::thread::hardware_concurrency()));

    const mmlab::cli::RunOutcome outcome = mmlab::cli::run(cfg);
    const std::string path = f.out.empty() ? cfg.output : f.out;
    if (emit(outcome.report, path, f.quiet) != 0) return 1;
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimax, multiplier-path and multiplicity toolkit"};
    app.require_subcommand(1);
    Flags flags;
    std::string selected;

    const std::vector<std::pair<std::string, std::vector<std::string>>> groups = {
        {"minimax", {"check"}},
        {"path", {"solve", "scan"}},
        {"spherical", {"analyze"}},
        {"theta", {"compute"}},
        {"multiplicity", {"scan-rho", "find-lambda", "farthest-tie", "three-solutions"}},
        {"integral", {"verify-82", "jensen", "log-ineq"}},
    };
    for (const auto& [group, actions] : groups) {
        auto* g = app.add_subcommand(group, group + " commands");
        g->require_subcommand(1);
        for (const auto& action : actions) {
            auto* sub = g->add_subcommand(action);
            add_run_options(sub, flags);
            sub->callback([&selected, name = group + "." + action] { selected = name; });
        }
    }

    auto* list = app.add_subcommand("builtins", "list builtin fixtures");
    list->callback([] {
        for (const auto& b : mmlab::cli::builtins()) std::cout << b.name << "\t" << b.summary << "\n";
    });
    std::string show_name;
    auto* show = app.add_subcommand("show-builtin", "print the configuration of a builtin fixture");
    show->add_option("name", show_name)->required();
    show->callback([&show_name] {
        try {
            std::cout << mmlab::cli::to_json(mmlab::cli::builtin_config(show_name)).dump(2) << "\n";
        } catch (const mmlab::Error& e) {
            throw CLI::ValidationError(std::string(e.what()) + " (" + e.context() + ")");
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (selected.empty()) return 0;
    return execute(selected, flags);
}
