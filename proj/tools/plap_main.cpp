#include "plap/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv)
{
    using namespace plap::cli;

    CLI::App app{"Eigenvalues of the one-dimensional weighted p-Laplacian"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format_name = "csv";
    bool verbose = false;

    for (Subcommand s : all_subcommands()) {
        CLI::App* sub = app.add_subcommand(std::string(to_string(s)));
        sub->add_option("--config", config_path, "JSON config document")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output file (default: standard output)");
        sub->add_option("--format", format_name, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--verbose", verbose, "timing and progress on standard error");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const Subcommand command = *parse_subcommand(chosen->get_name());
    const Format format = format_name == "json" ? Format::json : Format::csv;

    std::ifstream in(config_path);
    std::stringstream text;
    text << in.rdbuf();

    RunConfig config;
    try {
        config = parse_config(text.str(), command);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    if (verbose) std::cerr << "config:\n" << canonical_json(config);

    if (out_path.empty()) return run(config, format, std::cout, &std::cerr, verbose);
    // write to a buffer first so a failed run leaves no partial file behind
    std::ostringstream buffer;
    const int status = run(config, format, buffer, &std::cerr, verbose);
    if (!buffer.str().empty()) {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            std::cerr << "cannot open " << out_path << " for writing\n";
            return exit_config;
        }
        file << buffer.str();
    }
    return status;
}
