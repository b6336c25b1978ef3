#include "ina/service.hpp"

#include "ina/bundle_io.hpp"
#include "ina/error.hpp"
#include "ina/synthesis.hpp"

#include <httplib.h>

namespace ina {

using json = nlohmann::ordered_json;

namespace {

HttpResponse json_response(int status, const json& body) { return {status, body.dump()}; }

HttpResponse error_response(int status, std::string_view code, std::string_view message) {
    return json_response(status, {{"error", code}, {"message", message}});
}

HttpResponse not_ready() { return error_response(503, "Unavailable", "model bundle is loading"); }

}  // namespace

void QaService::set_bundle(std::shared_ptr<const ModelBundle> bundle) {
    std::lock_guard lock(mutex_);
    bundle_ = std::move(bundle);
}

std::shared_ptr<const ModelBundle> QaService::bundle() const {
    std::lock_guard lock(mutex_);
    return bundle_;
}

HttpResponse QaService::health() const { return json_response(200, "ok"); }

HttpResponse QaService::model_info() const {
    const auto b = bundle();
    if (!b) return not_ready();
    BundleManifest manifest;
    manifest.metadata = b->metadata();
    manifest.config = b->config();
    auto doc = manifest_to_json(manifest);
    doc.erase("files");
    doc["mlsu_count"] = b->registry().size();
    doc["lexicon_size"] = b->lexicon().size();
    doc["pos_model_trained"] = b->pos_model_trained();
    return json_response(200, doc);
}

HttpResponse QaService::ask(std::string_view body) const {
    const auto b = bundle();
    if (!b) return not_ready();

    json request;
    try {
        request = json::parse(body);
    } catch (const json::exception&) {
        return error_response(400, "BadRequest", "body is not valid JSON");
    }
    if (!request.is_object() || !request.contains("question") || !request["question"].is_string())
        return error_response(400, "BadRequest", "body must be an object with a string 'question'");

    RejectConfig reject = reject_config_for(*b);
    if (request.contains("threshold")) {
        const auto& t = request["threshold"];
        if (!t.is_number() || t.get<double>() < 0.0 || t.get<double>() > 1.0)
            return error_response(400, "BadRequest", "'threshold' must be a number in [0, 1]");
        reject.mlsu_min = t.get<double>();
    }

    const auto question = request["question"].get<std::string>();
    try {
        const auto trace = synthesize(*b, question, reject);
        json out;
        out["answer"] = trace.rejected ? json(nullptr) : json(trace.final_answer);
        out["rejected"] = trace.rejected;
        if (trace.rejected) out["reason"] = reject_reason_name(trace.reason);
        out["confidence"] = trace.overall_confidence;
        out["trace"] = trace_to_json(trace);
        return json_response(200, out);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::EmptyQuestion) return error_response(422, to_string(e.code()), e.what());
        return error_response(500, to_string(e.code()), e.what());
    }
}

struct HttpServer::Impl {
    Impl(QaService& s, ServeOptions o) : service(s), options(std::move(o)) {}

    QaService& service;
    ServeOptions options;
    httplib::Server server;
    int port = -1;
};

HttpServer::HttpServer(QaService& service, ServeOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
    auto& server = impl_->server;
    auto& svc = impl_->service;
    auto reply = [](httplib::Response& res, const HttpResponse& r) {
        res.status = r.status;
        res.set_content(r.body, "application/json; charset=utf-8");
    };
    server.Post("/api/ask", [&svc, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.ask(req.body));
    });
    server.Get("/api/model", [&svc, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, svc.model_info());
    });
    server.Get("/healthz", [&svc, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, svc.health());
    });
    if (impl_->options.static_dir && !server.set_mount_point("/", impl_->options.static_dir->string()))
        throw Error(ErrorCode::IoFailure, "cannot serve static files from " + impl_->options.static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
    auto& i = *impl_;
    if (i.options.port == 0)
        i.port = i.server.bind_to_any_port(i.options.bind);
    else
        i.port = i.server.bind_to_port(i.options.bind, i.options.port) ? i.options.port : -1;
    if (i.port < 0)
        throw Error(ErrorCode::IoFailure,
                    "cannot bind " + i.options.bind + ":" + std::to_string(i.options.port));
    return i.port;
}

void HttpServer::listen() {
    if (impl_->port < 0) throw Error(ErrorCode::IoFailure, "server is not bound");
    impl_->server.listen_after_bind();
}

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace ina
