#include <csignal>
#include <iostream>

#include "CLI11.hpp"
#include "httplib.h"
#include "hsmdp/service.hpp"

namespace {
httplib::Server* g_server = nullptr;
}

int main(int argc, char** argv) {
    CLI::App app{"Incentivized to-do list scheduling service"};
    std::string host = "0.0.0.0";
    int port = 8080;
    app.add_option("--host", host);
    app.add_option("-p,--port", port)->check(CLI::Range(1, 65535));
    CLI11_PARSE(app, argc, argv);

    hsmdp::Service service(hsmdp::store_from_env(), hsmdp::options_from_env());
    httplib::Server server;
    hsmdp::mount(server, service);
    g_server = &server;
    std::signal(SIGINT, [](int) { g_server->stop(); });
    std::signal(SIGTERM, [](int) { g_server->stop(); });

    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ':' << port << '\n';
        return 1;
    }
}
