#include "smartcore/store/http_server.hpp"

#include <httplib.h>

namespace smartcore::store {

using nlohmann::json;

json to_json(const PackageRecord& r) {
    json versions = json::array();
    for (const auto& v : r.versions)
        versions.push_back({{"version", v.version.str()}, {"digest", v.digest}, {"manifest", to_json(v.manifest)}});
    return {{"app_id", r.app_id}, {"versions", versions}};
}

json to_json(const Package& p) {
    return {{"app_id", p.app_id},
            {"version", p.version.str()},
            {"manifest", to_json(p.manifest)},
            {"digest", p.digest},
            {"payload_b64", base64_encode(p.payload)}};
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, {{"error", message}});
}

int status_for(const StoreError& e) {
    switch (e.code()) {
        case StoreError::Code::NotFound: return 404;
        case StoreError::Code::Invalid:
        case StoreError::Code::Conflict: return 400;
        case StoreError::Code::Integrity:
        case StoreError::Code::Io: return 500;
    }
    return 500;
}

}  // namespace

StoreServer::StoreServer(AppStore& store, std::string token)
    : store_(store), token_(std::move(token)), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

StoreServer::~StoreServer() { stop(); }

void StoreServer::install_routes() {
    server_->set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
        if (token_.empty() || req.get_header_value("Authorization") == "Bearer " + token_)
            return httplib::Server::HandlerResponse::Unhandled;
        fail(res, 401, "missing or wrong bearer token");
        return httplib::Server::HandlerResponse::Handled;
    });

    server_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const StoreError& e) {
            fail(res, status_for(e), e.what());
        } catch (const json::exception& e) {
            fail(res, 400, std::string("malformed JSON: ") + e.what());
        } catch (const std::invalid_argument& e) {
            fail(res, 400, e.what());
        } catch (const std::exception& e) {
            fail(res, 500, e.what());
        }
    });

    server_->Get("/apps", [this](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const auto& r : store_.list_packages()) out.push_back(to_json(r));
        reply(res, 200, out);
    });

    server_->Get(R"(/apps/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
        std::optional<Version> v;
        if (req.has_param("version")) {
            std::string s = req.get_param_value("version");
            if (s != "latest") v = Version::parse(s);
        }
        reply(res, 200, to_json(store_.get_package(req.matches[1], v)));
    });

    server_->Get("/alerts", [this](const httplib::Request& req, httplib::Response& res) {
        double since = 0.0;
        if (req.has_param("since")) {
            std::string s = req.get_param_value("since");
            std::size_t used = 0;
            try {
                since = std::stod(s, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != s.size()) return fail(res, 400, "'since' must be a number");
        }
        json out = json::array();
        for (const auto& a : store_.get_alerts(since)) out.push_back(to_json(a));
        reply(res, 200, out);
    });

    server_->Post("/sightings", [this](const httplib::Request& req, httplib::Response& res) {
        SightingReport r = sighting_from_json(json::parse(req.body));
        auto seq = store_.post_sighting(r);
        reply(res, 200, {{"ack", true}, {"seq", seq}});
    });
}

int StoreServer::start(const std::string& host, int port) {
    port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (port_ <= 0) throw StoreError(StoreError::Code::Io, "cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
}

void StoreServer::serve_forever(const std::string& host, int port) {
    if (!server_->bind_to_port(host, port))
        throw StoreError(StoreError::Code::Io, "cannot bind " + host + ":" + std::to_string(port));
    port_ = port;
    server_->listen_after_bind();
}

void StoreServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace smartcore::store
