#pragma once

#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "smartcore/gateway/gateway.hpp"

namespace smartcore::gateway {

nlohmann::json to_json(const ProbeRecord& r);
nlohmann::json to_json(const AppHandle& h);
nlohmann::json to_json(const Outcome& o);
nlohmann::json to_json(const obd::ObdResponse& r);

/// One JSON object per line.
void write_probe_jsonl(std::ostream& out, const std::vector<ProbeRecord>& records);

Caller caller_from_json(const nlohmann::json& j);

/// JSON command front end for a gateway.
///
/// Request:  {"op": "...", "principal": "...", "args": {...}, "caller": {...}}
/// Response: {"ok": true, "data": ...} or {"ok": false, "error": {"code": ..., "message": ...}}
///
/// "caller" is {"kind": "owner"} (default) or {"app": id, "token": capability}.
///
///   op             args
///   attach         kind (dongle|application), profile, token
///   detach         -
///   submit         pid, t                     -> outcome
///   run_until      t
///   block/unblock  -
///   set_rate       rate
///   probe          since                      -> [ProbeRecord]
///   send_raw       pid, t                     -> response
///   set_transform  alg, W, p, R_uniform, seed (null args clear it)
///   policy_add     policy                     -> {"id"}
///   policy_edit    policy (with id)
///   policy_rm      id
///   policy_list    -                          -> [Policy]   (principal optional)
///   app_install    version, manifest, digest  -> AppHandle  (principal = app id)
///   app_start / app_pause / app_halt / app_remove
///   self_update    version, manifest, digest
///   stats          -                          -> session counters
///
/// Not thread-safe; route concurrent producers through CommandLoop.
class ManagementApi {
public:
    explicit ManagementApi(Gateway& gw) : gw_(gw) {}

    nlohmann::json handle(const nlohmann::json& command);

private:
    nlohmann::json dispatch(const std::string& op, const nlohmann::json& command);

    Gateway& gw_;
};

}  // namespace smartcore::gateway
