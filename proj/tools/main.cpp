#include "cli_common.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

/// JSM_NUM_THREADS caps the worker threads of every command.
void apply_thread_env() {
    if (const char* value = std::getenv("JSM_NUM_THREADS")) {
        const int threads = std::atoi(value);
        if (threads >= 1) jsm_set_num_threads(threads);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jointly smooth functions across multi-view data (library " + std::string(jsm_version()) + ")"};
    app.require_subcommand(1);
    app.set_version_flag("--version", jsm_version());
    jsmcli::add_generate(app);
    jsmcli::add_fit(app);
    jsmcli::add_threshold(app);
    jsmcli::add_select(app);
    jsmcli::add_extend(app);
    jsmcli::add_embed(app);
    jsmcli::add_plot_data(app);
    jsmcli::add_preprocess(app);
    jsmcli::add_bench(app);

    apply_thread_env();
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const jsmcli::Failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const jsmcli::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
