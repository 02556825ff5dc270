#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xxz/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Bethe ansatz solver and checks for the open XXZ chain at roots of unity", "xxz"};
    app.set_version_flag("--version", std::string(XXZ_VERSION));

    xxz::cli::Invocation inv;
    std::string format = "json";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", inv.config_path, "TOML run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", inv.out_dir, "results root (default: $XXZ_RESULTS_DIR, then ./results)");
        sub->add_option("--tol", inv.tol, "Newton tolerance on the normalized residual");
        sub->add_option("--max-iter", inv.max_iter, "Newton iteration cap");
        sub->add_option("--format", format, "record format printed to stdout")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--jobs", inv.jobs, "parallel workers for sweep");
    };

    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                    std::vector<std::string> words) {
        CLI::App* sub = parent->add_subcommand(name, help);
        add_common(sub);
        sub->callback([&inv, words] { inv.command = words; });
        return sub;
    };

    leaf(&app, "spectrum", "diagonalize the Hamiltonian", {"spectrum"});
    CLI::App* bethe = app.add_subcommand("bethe", "solve Bethe equations")->require_subcommand(1);
    leaf(bethe, "solve", "transfer-matrix extraction, seeds or continuation", {"bethe", "solve"});
    leaf(bethe, "refine", "Newton on the given seeds only", {"bethe", "refine"});
    CLI::App* verify = app.add_subcommand("verify", "residual suites")->require_subcommand(1);
    for (const char* s : {"funcrel", "conds", "commute", "derivative", "detm"})
        leaf(verify, s, std::string("residual suite ") + s, {"verify", s});
    leaf(&app, "match", "pair Bethe energies with the diagonalized spectrum", {"match"});
    CLI::App* repro = app.add_subcommand("reproduce", "rebuild a built-in table")->require_subcommand(1);
    leaf(repro, "table1", "s = 1/2, N = 4 spectrum", {"reproduce", "table1"});
    leaf(repro, "table2", "s = 1, N = 2 spectrum", {"reproduce", "table2"});
    leaf(&app, "sweep", "run a task over [[point]] entries", {"sweep"});
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << xxz::cli::detail::error_object(xxz::ErrorKind::InvalidParams, e.what(),
                                                    xxz::cli::invalid_config)
                         .dump()
                  << "\n";
        return xxz::cli::invalid_config;
    }

    inv.format = format == "csv" ? xxz::RecordFormat::Csv : xxz::RecordFormat::Json;
    return xxz::cli::run(inv);
}
