// qnet — driven dissipative three-qubit network simulator, command line front end.
//
//   qnet run <config> [--out DIR] [--mode M] [--override key=value ...]
//
// Thread count for scan cells: QNET_THREADS (or scan.threads in the config).
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qnet/run.hpp"

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven dissipative three-qubit network simulator"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "execute a run configuration");
    std::string config_path, out_dir, mode_override;
    std::vector<std::string> overrides;
    run_cmd->add_option("config", config_path, "run configuration file")->required();
    run_cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
    run_cmd->add_option("--mode", mode_override, "mode override: trajectory|field_free|scan|convergence");
    run_cmd->add_option("--override", overrides, "key=value overrides, applied after the file");

    CLI11_PARSE(app, argc, argv);

    try {
        std::string text = read_text(config_path);
        if (!mode_override.empty()) text = qnet::apply_override(text, "mode = " + mode_override);
        for (const auto& kv : overrides) text = qnet::apply_override(text, kv);

        qnet::RunConfig cfg;
        try {
            cfg = qnet::parse_config(text);
        } catch (const std::exception& e) {
            std::cerr << "configuration error: " << e.what() << "\n";
            return qnet::kExitConfig;
        }
        return qnet::run(cfg, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return qnet::kExitConfig;
    }
}
