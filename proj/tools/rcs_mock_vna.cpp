// Standalone mock instrument for trying `rcs acquire` by hand. Serves the
// given Touchstone sweeps on 127.0.0.1 until interrupted.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>

#include "rcs/ingest.hpp"
#include "rcs/vna.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mock SCPI network analyzer"};
    std::vector<std::string> files;
    std::string fault = "none";
    int delay_ms = 0;
    app.add_option("sweeps", files, "Touchstone files served in order")->required();
    app.add_option("--fault", fault, "Fault mode")
        ->check(CLI::IsMember({"none", "disconnect", "truncate", "garbage", "delay"}))
        ->capture_default_str();
    app.add_option("--delay-ms", delay_ms, "Reply delay for --fault delay");
    CLI11_PARSE(app, argc, argv);

    try {
        std::vector<std::vector<rcs::Complex>> sweeps;
        for (const auto& f : files) {
            const auto s = rcs::read_sweep_file(f);
            sweeps.emplace_back(s.samples().begin(), s.samples().end());
        }
        sigset_t set;
        sigemptyset(&set);
        sigaddset(&set, SIGINT);
        sigaddset(&set, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set, nullptr);  // before the server thread starts

        rcs::MockVna server(std::move(sweeps), {rcs::fault_mode_from_string(fault), delay_ms});
        std::printf("listening on 127.0.0.1:%d\n", server.port());
        std::fflush(stdout);
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "rcs_mock_vna: error: %s\n", e.what());
        return 3;
    }
    return 0;
}
