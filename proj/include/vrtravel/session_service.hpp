#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <boost/asio/io_context.hpp>

#include "vrtravel/engine.hpp"

namespace vrtravel {

struct ServiceOptions {
    std::string address = "127.0.0.1";
    unsigned short port = 8080;
    /// Defaults for every session; a start message may override any of it.
    EngineConfig engine;
    /// World used when a start message names none.
    std::shared_ptr<const WorldModel> world;
    /// When set, finished sessions save their input script and event log here.
    std::optional<std::filesystem::path> record_dir;
    /// Unsent state messages beyond this are dropped (late client); other messages always go out.
    std::size_t max_pending_states = 32;
};

/// "host:port" or ":port". Throws ConfigError.
std::pair<std::string, unsigned short> parse_bind(std::string_view bind);

/// WebSocket endpoint /session plus GET /healthz. One engine session per connection.
class SessionServer {
public:
    /// Binds immediately; port 0 picks a free port. Throws on bind failure.
    SessionServer(boost::asio::io_context& ioc, ServiceOptions opts);
    ~SessionServer();
    SessionServer(const SessionServer&) = delete;
    SessionServer& operator=(const SessionServer&) = delete;

    unsigned short port() const;
    void start();
    void stop();

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// Serves until SIGINT or SIGTERM.
void serve(ServiceOptions opts);

}  // namespace vrtravel
