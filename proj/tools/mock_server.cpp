// Serves the scripted chat, embedding and UMLS stand-ins over HTTP so the
// CLI can be exercised without external services.

#include "scripted_services.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Scripted endpoints for offline runs"};
    int port = 8089;
    std::filesystem::path write_config;
    std::filesystem::path data_dir = "data";
    app.add_option("--port", port, "Port on 127.0.0.1 (0 picks one)");
    app.add_option("--write-config", write_config, "Write a matching CLI config file here and keep serving");
    app.add_option("--data", data_dir, "Dataset directory referenced by the written config");
    CLI11_PARSE(app, argc, argv);

    auto services = std::make_shared<kgrag::testing::ScriptedServices>();
    kgrag::testing::ScriptedHttpServer server(services, port);
    if (!write_config.empty()) {
        auto work = std::filesystem::absolute(write_config).parent_path();
        std::ofstream(write_config) << kgrag::testing::scripted_config_json(server.base_url(), work,
                                                                           std::filesystem::absolute(data_dir));
    }
    std::printf("listening on %s\n", server.base_url().c_str());
    std::fflush(stdout);
    server.wait();
    return 0;
}
