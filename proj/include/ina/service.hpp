#pragma once
// JSON-over-HTTP front end.
//
//   POST /api/ask    {"question": "...", "threshold": 0.2}
//   GET  /api/model  bundle stats
//   GET  /healthz    "ok"
//
// QaService holds the request logic so it can be exercised without sockets;
// HttpServer binds it to a listening port.

#include "ina/pipeline.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace ina {

struct HttpResponse {
    int status = 200;
    std::string body;
};

class QaService {
public:
    /// Until a bundle is installed the API answers 503.
    void set_bundle(std::shared_ptr<const ModelBundle> bundle);
    std::shared_ptr<const ModelBundle> bundle() const;
    bool ready() const { return bundle() != nullptr; }

    HttpResponse ask(std::string_view body) const;
    HttpResponse model_info() const;
    HttpResponse health() const;

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const ModelBundle> bundle_;
};

struct ServeOptions {
    std::string bind = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8080;
    std::optional<std::filesystem::path> static_dir;
};

class HttpServer {
public:
    HttpServer(QaService& service, ServeOptions options);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds the socket; returns the bound port. Throws Error(IoFailure).
    int bind();
    /// Serves until stop() is called. bind() must have succeeded.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ina
