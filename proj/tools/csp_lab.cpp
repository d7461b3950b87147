#include <CLI11.hpp>

#include "csp/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Scattering, soliton and long-time experiments for the complex short pulse equation"};
    app.set_version_flag("--version", std::string(csp::cli::version));
    app.require_subcommand(1);

    std::string config, out, convention = "real_phase";
    app.add_option("--convention", convention, "phase convention for leading-order predictions")
        ->check(CLI::IsMember({"as_printed", "real_phase"}));

    const std::pair<const char*, const char*> commands[] = {
        {"scatter", "reflection table of an initial profile"},
        {"soliton", "soliton field or parametric curve from a discrete spectrum"},
        {"evolve", "spectral time integration"},
        {"asymptote", "leading-order long-time prediction"},
        {"compare", "sector comparison of a trajectory against the prediction"},
    };
    for (auto [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "JSON config file")->required();
        sub->add_option("--out", out, "output directory")->required();
        sub->add_option("--convention", convention, "phase convention for leading-order predictions")
            ->check(CLI::IsMember({"as_printed", "real_phase"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto conv = convention == "as_printed" ? csp::PhaseConvention::as_printed : csp::PhaseConvention::real_phase;
    return csp::cli::run(app.get_subcommands().front()->get_name(), config, out, conv);
}
