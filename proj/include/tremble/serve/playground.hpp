#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

namespace tremble::serve {

/// Limits on instances a remote client may request.
constexpr std::size_t kMaxObjects = 5;
constexpr std::size_t kMaxBudget = 6;

struct Reply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// In-memory co-assembly sessions where the remote client plays the nature.
/// Each session holds a solved instance and one live run; requests on one
/// session are serialized, distinct sessions proceed in parallel.
class PlaygroundService {
public:
    PlaygroundService();
    ~PlaygroundService();

    /// Routes one request. `path` excludes the query string.
    Reply handle(const std::string& method, const std::string& path, const std::string& body);

    std::size_t num_sessions() const;

private:
    struct Session;

    Reply create(const std::string& body);
    Reply view(Session& s);
    Reply step(Session& s);
    Reply resolve(Session& s, const std::string& body);
    Reply hint(Session& s);
    Reply log(Session& s);
    std::shared_ptr<Session> find(const std::string& id) const;

    mutable std::shared_mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_ = 0;
    std::uint64_t salt_;
};

/// HTTP front end forwarding /api/ requests to a service.
class HttpServer {
public:
    explicit HttpServer(PlaygroundService& service);
    ~HttpServer();

    /// Binds host:port (port 0 picks a free one) and returns the bound port,
    /// or -1 on failure.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after a successful bind.
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tremble::serve
