#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spamforge/harness.hpp"

namespace {

// Pull sweep.* entries out of a key=value line list; the rest feed the base
// configuration.
void split_sweep(const std::vector<std::string>& entries,
                 std::vector<std::string>& plain,
                 std::map<std::string, std::vector<std::string>>& grid) {
    for (const auto& e : entries) {
        const auto eq = e.find('=');
        std::string key = eq == std::string::npos ? e : e.substr(0, eq);
        const auto b = key.find_first_not_of(" \t");
        if (b != std::string::npos) key = key.substr(b);
        if (key.rfind("sweep.", 0) == 0 && eq != std::string::npos) {
            std::vector<std::string> values;
            std::stringstream ss(e.substr(eq + 1));
            std::string item;
            while (std::getline(ss, item, ',')) values.push_back(item);
            grid[key.substr(6)] = std::move(values);
        } else {
            plain.push_back(e);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spam-forge: spatial preferential attachment experiment runner"};
    std::string kind, config_path, out_dir;
    std::vector<std::string> sets;
    long workers = -1;
    app.add_option("kind", kind,
                   "experiment kind (build, degrees, distances, percolation, layers, "
                   "truncation, census, modulus, two-connection)")
        ->required();
    app.add_option("--config", config_path, "configuration file")->required();
    app.add_option("--set", sets, "override, key=value (repeatable)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--workers", workers, "worker thread count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        std::ifstream is(config_path);
        if (!is) throw spamforge::validation_error({"cannot open config file " + config_path});
        std::vector<std::string> file_entries;
        std::string line;
        while (std::getline(is, line)) file_entries.push_back(line);

        std::vector<std::string> plain;
        std::map<std::string, std::vector<std::string>> grid;
        split_sweep(file_entries, plain, grid);
        split_sweep(sets, plain, grid);

        plain.push_back("experiment.kind=" + kind);
        if (!out_dir.empty()) plain.push_back("output.dir=" + out_dir);
        if (workers >= 0) {
            plain.push_back("output.workers=" + std::to_string(workers));
        } else if (const char* env = std::getenv("SPAM_FORGE_WORKERS")) {
            plain.push_back("output.workers=" + std::string(env));
        }

        std::ostringstream text;
        for (const auto& e : plain) text << e << '\n';
        spamforge::ExperimentConfig cfg = spamforge::parse_config_text(text.str());
        if (grid.empty())
            spamforge::run_experiment(cfg);
        else
            spamforge::run_sweep(cfg, grid);
        return 0;
    } catch (const spamforge::validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
