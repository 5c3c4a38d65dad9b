#ifndef GERMKG_TEST_HTTP_FIXTURE_HPP
#define GERMKG_TEST_HTTP_FIXTURE_HPP

#include <stdexcept>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "germkg/server.hpp"

namespace fixture {

/// Serves a graph on an ephemeral loopback port for the lifetime of the object.
class LiveServer {
public:
    explicit LiveServer(const germkg::KnowledgeGraph& g) {
        germkg::server::install_routes(server_, g);
        port_ = server_.bind_to_any_port("127.0.0.1");
        if (port_ <= 0) throw std::runtime_error("cannot bind a test port");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LiveServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }
    LiveServer(const LiveServer&) = delete;
    LiveServer& operator=(const LiveServer&) = delete;

    struct Reply {
        int status = 0;
        nlohmann::json body;
    };

    /// GET `path` (already percent-encoded) and parse the JSON body.
    Reply get(const std::string& path) const {
        httplib::Client client("127.0.0.1", port_);
        auto res = client.Get(path);
        if (!res) throw std::runtime_error("request failed: " + path);
        return {res->status, nlohmann::json::parse(res->body)};
    }

    int port() const { return port_; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

} // namespace fixture

#endif
