#include "httplib.h"
#include "tremble/serve/playground.hpp"

namespace tremble::serve {

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(PlaygroundService& service) : impl_(std::make_unique<Impl>()) {
    auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        const Reply r = service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type + "; charset=utf-8");
    };
    impl_->server.Get(R"(/api/.*)", forward);
    impl_->server.Post(R"(/api/.*)", forward);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }

}  // namespace tremble::serve
