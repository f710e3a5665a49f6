#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <thread>

#include "questd/daemon/daemon.hpp"

namespace httplib {
class Server;
}

namespace questd::daemon {

/// HTTP JSON API over a running Daemon:
///   POST /events       DevEvent JSON → 202 {"log_position"}, 400 invalid, 409 ts regression
///   GET  /achievements catalog
///   GET  /state        state view
///   POST /reset        {"confirm": true} → 200, 400 without confirmation
///   GET  /live         chunked NDJSON: notifications and state deltas in apply order
/// Serves the dashboard's static files under "/" when the config names a directory.
class ApiServer {
public:
    /// Binds 127.0.0.1:`port`; port 0 picks a free port. Throws PortInUse.
    ApiServer(Daemon& daemon, std::uint16_t port, std::string host = "127.0.0.1");
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    void start();
    void stop();
    std::uint16_t port() const { return port_; }

private:
    void routes();

    Daemon& daemon_;
    std::unique_ptr<httplib::Server> server_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread thread_;
};

}  // namespace questd::daemon
