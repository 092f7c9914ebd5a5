#pragma once

#include <memory>
#include <string>
#include <thread>

#include "smartcore/store/store.hpp"

namespace httplib {
class Server;
}

namespace smartcore::store {

/// HTTP/JSON front end for an AppStore.
///
///     GET  /apps                  package summaries (no payload bytes)
///     GET  /apps/{id}?version=    manifest + base64 payload
///     GET  /alerts?since=         active alert records
///     POST /sightings             append a SightingReport
///
/// Every request must carry `Authorization: Bearer <token>` when a token is
/// configured.
class StoreServer {
public:
    StoreServer(AppStore& store, std::string token);
    ~StoreServer();
    StoreServer(const StoreServer&) = delete;
    StoreServer& operator=(const StoreServer&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port; throws StoreError(Io) if binding fails.
    int start(const std::string& host = "127.0.0.1", int port = 0);
    /// Blocks the calling thread until stop() is called from elsewhere.
    void serve_forever(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

private:
    void install_routes();

    AppStore& store_;
    std::string token_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = 0;
};

nlohmann::json to_json(const PackageRecord& r);
nlohmann::json to_json(const Package& p);  // payload as base64

}  // namespace smartcore::store
