#include "httplib.h"

#include "hsmdp/service.hpp"

namespace hsmdp {

void mount(httplib::Server& server, Service& service) {
    server.Post(R"(/api/([A-Za-z_]+))", [&service](const httplib::Request& req, httplib::Response& res) {
        Params params;
        for (const auto& [k, v] : req.params) params[k] = v;   // last value wins
        const Response out = service.handle_post(req.matches[1].str(), params, req.body);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    });
    server.Get("/health", [&service](const httplib::Request&, httplib::Response& res) {
        const Response out = service.health();
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
    });
}

} // namespace hsmdp
