#ifndef GERMKG_SERVER_HPP
#define GERMKG_SERVER_HPP

#include <charconv>
#include <functional>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "germkg/error.hpp"
#include "germkg/kg.hpp"
#include "germkg/query.hpp"

namespace germkg::server {

namespace detail {

inline void send_json(httplib::Response& res, const nlohmann::json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

inline void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, {{"error", message}}, status);
}

/// Runs a handler and maps library errors onto HTTP status codes.
inline void guarded(httplib::Response& res, const std::function<nlohmann::json()>& fn) {
    try {
        send_json(res, fn());
    } catch (const NotFoundError& e) {
        send_error(res, 404, e.what());
    } catch (const ValidationError& e) {
        send_error(res, 400, e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, e.what());
    }
}

inline long long int_param(const httplib::Request& req, const std::string& key, long long fallback) {
    if (!req.has_param(key)) return fallback;
    auto raw = req.get_param_value(key);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc() || ptr != raw.data() + raw.size())
        throw ValidationError("parameter '" + key + "' must be an integer, got '" + raw + "'");
    return value;
}

// The library default also sets SO_REUSEPORT, which lets a second server
// share a port that is already taken instead of failing to bind.
inline void exclusive_port(socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
}

inline std::size_t limit_param(const httplib::Request& req, std::size_t fallback) {
    auto v = int_param(req, "limit", static_cast<long long>(fallback));
    if (v < 0) throw ValidationError("parameter 'limit' must not be negative");
    return static_cast<std::size_t>(v);
}

inline std::optional<std::string> optional_param(const httplib::Request& req, const std::string& key) {
    if (!req.has_param(key)) return std::nullopt;
    auto v = req.get_param_value(key);
    if (v.empty()) return std::nullopt;
    return v;
}

} // namespace detail

/// Registers the read-only endpoints on `srv`. The graph must outlive the server.
inline void install_routes(httplib::Server& srv, const KnowledgeGraph& g) {
    using detail::guarded;
    srv.set_socket_options(detail::exclusive_port);

    srv.Get("/stats", [&g](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { return nlohmann::json(kg::stats(g)); });
    });
    srv.Get(R"(/diseases/(.+)/articles)", [&g](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return nlohmann::json(query::articles_and_genes_for_disease(g, req.matches[1].str())); });
    });
    srv.Get(R"(/genes/(.+)/articles)", [&g](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return nlohmann::json(query::articles_and_diseases_for_gene(g, req.matches[1].str())); });
    });
    srv.Get(R"(/articles/([^/]+))", [&g](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { return nlohmann::json(query::entities_for_article(g, req.matches[1].str())); });
    });
    srv.Get("/cooccurrence", [&g](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto level_name = req.has_param("level") ? req.get_param_value("level") : std::string("article");
            auto level = parse_cooccurrence_level(level_name);
            query::CooccurrenceFilter filter{detail::optional_param(req, "gene"), detail::optional_param(req, "disease")};
            auto rows = query::cooccurrence(g, level, filter);
            if (req.has_param("limit")) rows.resize(std::min(rows.size(), detail::limit_param(req, rows.size())));
            return nlohmann::json{{"level", level_name}, {"rows", rows}};
        });
    });
    srv.Get(R"(/nodes/(.+)/neighborhood)", [&g](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto depth = detail::int_param(req, "depth", 1);
            if (depth < min_neighborhood_depth || depth > max_neighborhood_depth)
                throw ValidationError("depth must be between 1 and 3, got " + std::to_string(depth));
            return nlohmann::json(query::neighborhood(g, req.matches[1].str(), static_cast<int>(depth)));
        });
    });
    srv.Get("/search", [&g](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto q = req.has_param("q") ? req.get_param_value("q") : std::string();
            auto hits = query::search(g, q, detail::limit_param(req, query::default_search_limit));
            return nlohmann::json{{"query", q}, {"results", hits}};
        });
    });
    srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty()) detail::send_error(res, res.status, "no route for " + req.method + " " + req.path);
    });
}

/// Blocks serving `g` on host:port until the server is stopped.
inline void serve(const KnowledgeGraph& g, const std::string& host, int port) {
    httplib::Server srv;
    install_routes(srv, g);
    if (!srv.bind_to_port(host, port))
        throw IoError("cannot bind " + host + ":" + std::to_string(port));
    srv.listen_after_bind();
}

} // namespace germkg::server

#endif
