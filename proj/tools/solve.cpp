// Reads an A1 request body and prints the A2 response, without HTTP.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hsmdp/service.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Schedule a to-do list from a request body"};
    std::string input = "-";
    std::vector<std::string> raw;
    app.add_option("input", input, "request body, - for stdin");
    app.add_option("-P,--param", raw, "key=value, e.g. -P n_durations=2 -P now=2020-08-03T08:00");
    CLI11_PARSE(app, argc, argv);

    hsmdp::Params params;
    for (const auto& kv : raw) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "expected key=value, got '" << kv << "'\n";
            return 2;
        }
        params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    std::stringstream body;
    if (input == "-") {
        body << std::cin.rdbuf();
    } else {
        std::ifstream in(input);
        if (!in) {
            std::cerr << "cannot read " << input << '\n';
            return 2;
        }
        body << in.rdbuf();
    }

    hsmdp::Service service(nullptr, hsmdp::options_from_env());
    const auto res = service.handle_post(hsmdp::kScheduleFunction, params, body.str());
    std::cout << res.body.dump(2) << '\n';
    return res.status == 200 ? 0 : 1;
}
