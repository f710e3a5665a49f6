#include "questd/daemon/api.hpp"

#include <httplib.h>

#include "questd/errors.hpp"
#include "questd/state_io.hpp"

namespace questd::daemon {

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, int status, const char* kind, const std::string& message) {
    reply(res, status, Json{{"error", kind}, {"message", message}});
}

}  // namespace

ApiServer::ApiServer(Daemon& daemon, std::uint16_t port, std::string host)
    : daemon_(daemon), server_(std::make_unique<httplib::Server>()) {
    server_->new_task_queue = [] { return new httplib::ThreadPool(32); };
    // httplib's defaults add SO_REUSEPORT, which would let a second daemon share the port.
    server_->set_socket_options([](auto sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    routes();
    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound <= 0) throw PortInUse("cannot bind any port on " + host);
        port_ = static_cast<std::uint16_t>(bound);
    } else {
        if (!server_->bind_to_port(host, port)) {
            throw PortInUse("port " + std::to_string(port) + " on " + host + " is already in use");
        }
        port_ = port;
    }
}

ApiServer::~ApiServer() { stop(); }

void ApiServer::start() {
    if (thread_.joinable()) return;
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void ApiServer::stop() {
    stopping_ = true;
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

void ApiServer::routes() {
    auto& svr = *server_;
    svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Headers", "Content-Type"},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    svr.Post("/events", [this](const httplib::Request& req, httplib::Response& res) {
        DevEvent event;
        try {
            event = event_from_json(Json::parse(req.body));
        } catch (const Json::exception& e) {
            return reply_error(res, 400, "InvalidEvent", std::string("body is not JSON: ") + e.what());
        } catch (const InvalidEvent& e) {
            return reply_error(res, 400, e.kind(), e.what());
        }
        try {
            const auto submitted = daemon_.submit(event);
            Json notifications = Json::array();
            for (const auto& n : submitted.notifications) notifications.push_back(to_json(n));
            reply(res, 202, Json{{"accepted", true}, {"log_position", submitted.log_position},
                                 {"notifications", notifications}});
        } catch (const OutOfOrderEvent& e) {
            reply_error(res, 409, e.kind(), e.what());
        } catch (const InvalidEvent& e) {
            reply_error(res, 400, e.kind(), e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, "InternalError", e.what());
        }
    });

    svr.Get("/achievements", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, catalog_json()); });

    svr.Get("/state", [this](const httplib::Request&, httplib::Response& res) { reply(res, 200, *daemon_.view()); });

    svr.Post("/reset", [this](const httplib::Request& req, httplib::Response& res) {
        bool confirmed = req.get_param_value("confirm") == "true";
        if (!req.body.empty()) {
            try {
                const auto body = Json::parse(req.body);
                confirmed = confirmed || (body.is_object() && body.value("confirm", false) == true);
            } catch (const Json::exception& e) {
                return reply_error(res, 400, "InvalidRequest", std::string("body is not JSON: ") + e.what());
            }
        }
        try {
            const auto submitted = daemon_.reset(confirmed);
            reply(res, 200, Json{{"reset", true}, {"log_position", submitted.log_position}});
        } catch (const NotConfirmed& e) {
            reply_error(res, 400, e.kind(), e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, "InternalError", e.what());
        }
    });

    svr.Get("/live", [this](const httplib::Request&, httplib::Response& res) {
        auto cursor = std::make_shared<std::uint64_t>(daemon_.feed().head());
        auto greeted = std::make_shared<bool>(false);
        res.set_header("Cache-Control", "no-cache");
        res.set_chunked_content_provider("application/x-ndjson", [this, cursor, greeted](std::size_t,
                                                                                          httplib::DataSink& sink) {
            if (!*greeted) {
                *greeted = true;
                const auto view = daemon_.view();
                const auto hello = Json{{"type", "hello"},
                                        {"log_position", view->at("log_position")},
                                        {"digest", view->at("digest")}}
                                       .dump() +
                                   "\n";
                return sink.write(hello.data(), hello.size());
            }
            if (stopping_ || !sink.is_writable()) {
                sink.done();
                return true;
            }
            auto batch = daemon_.feed().wait(*cursor, std::chrono::milliseconds(250));
            std::string chunk;
            if (batch.lagged) chunk += Json{{"type", "resync"}}.dump() + "\n";
            for (const auto& line : batch.lines) chunk += line + "\n";
            if (!chunk.empty() && !sink.write(chunk.data(), chunk.size())) return false;
            if (batch.closed) sink.done();
            return true;
        });
    });

    if (const auto& dir = daemon_.config().dashboard_dir) svr.set_mount_point("/", dir->string());
}

}  // namespace questd::daemon
