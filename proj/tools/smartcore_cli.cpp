#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "smartcore/cli/policy_state.hpp"
#include "smartcore/cli/report.hpp"
#include "smartcore/cli/scenario.hpp"
#include "smartcore/partition/calibrate.hpp"
#include "smartcore/policy/policy_io.hpp"
#include "smartcore/store/http_server.hpp"

using namespace smartcore;
using nlohmann::json;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

int print_responses(const std::vector<json>& responses) {
    for (const auto& r : responses) {
        if (!r.value("ok", false)) {
            std::cerr << "error: " << r["error"].value("code", "") << ": " << r["error"].value("message", "") << "\n";
            return kExitFailed;
        }
    }
    return 0;
}

store::StoreServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SmartCore gateway simulator and experiment runner"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run a scenario and report its metrics");
    std::string scenario_path, out_path, format = "text";
    std::optional<std::uint64_t> seed;
    run->add_option("--scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", out_path, "Also write the JSON report here");
    run->add_option("--format", format, "stdout format")->check(CLI::IsMember({"json", "text"}));

    // policy
    auto* pol = app.add_subcommand("policy", "Manage user-defined access policies");
    pol->require_subcommand(1);
    std::string state_path = "smartcore_policies.json";
    pol->add_option("--state", state_path, "Policy state file")->capture_default_str();
    auto* pol_add = pol->add_subcommand("add", "Add policies from a policy document");
    std::string doc_path;
    pol_add->add_option("--file", doc_path, "Policy document JSON")->required()->check(CLI::ExistingFile);
    auto* pol_rm = pol->add_subcommand("rm", "Remove a user policy");
    std::string policy_id;
    pol_rm->add_option("--id", policy_id, "Policy id")->required();
    auto* pol_list = pol->add_subcommand("list", "List policies");
    std::string list_principal;
    pol_list->add_option("--principal", list_principal, "Only this principal");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "Fit the partition cost model to the bundled measurements");
    std::string fixture_path, model_out, residual_out;
    cal->add_option("--fixtures", fixture_path, "Calibration fixture JSON")->required();
    cal->add_option("--out", model_out, "Fitted model output")->required();
    cal->add_option("--report", residual_out, "Residual report output (JSON)");

    // store
    auto* st = app.add_subcommand("store", "Local application store and alert database");
    st->require_subcommand(1);
    std::string data_dir = "store_data";
    st->add_option("--data", data_dir, "Store directory")->capture_default_str();
    auto* serve = st->add_subcommand("serve", "Serve the HTTP/JSON endpoints");
    std::string host = "127.0.0.1", token;
    int port = 8080;
    serve->add_option("--host", host)->capture_default_str();
    serve->add_option("--port", port)->capture_default_str();
    serve->add_option("--token", token, "Required bearer token (empty disables the check)");
    auto* publish = st->add_subcommand("publish", "Publish a package version");
    std::string app_id, version, manifest_path, payload_path;
    publish->add_option("--app", app_id)->required();
    publish->add_option("--version", version)->required();
    publish->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    publish->add_option("--payload", payload_path)->required()->check(CLI::ExistingFile);
    auto* alert = st->add_subcommand("alert", "Insert or update an alert record");
    std::string alert_path;
    alert->add_option("--file", alert_path, "Alert record JSON")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto sc = cli::load_scenario(scenario_path);
            if (seed) {
                sc.seed = *seed;
                if (sc.privacy) sc.privacy->config.seed = *seed;
            }
            auto report = cli::run_scenario(sc);
            std::string js = cli::to_json(report).dump(2) + "\n";
            if (!out_path.empty()) write_file(out_path, js);
            std::cout << (format == "json" ? js : cli::render_text(report));
            return report.passed() ? 0 : kExitFailed;
        }

        if (*pol) {
            auto state = cli::load_policy_state(state_path);
            std::vector<json> cmds;
            if (*pol_add) {
                auto doc = policy::parse_policy_document(json::parse(slurp(doc_path)));
                bool known = std::any_of(state.principals.begin(), state.principals.end(),
                                         [&](const policy::Principal& p) { return p.id == doc.principal; });
                if (!known) {
                    json args = {{"kind", doc.kind ? policy::to_string(*doc.kind) : "dongle"},
                                 {"profile", doc.profile.value_or("")},
                                 {"token", doc.token.value_or("")}};
                    cmds.push_back({{"op", "attach"}, {"principal", doc.principal}, {"args", args}});
                }
                for (const auto& p : doc.policies)
                    cmds.push_back({{"op", "policy_add"}, {"principal", doc.principal}, {"args", {{"policy", policy::to_json(p)}}}});
            } else if (*pol_rm) {
                cmds.push_back({{"op", "policy_rm"}, {"args", {{"id", policy_id}}}});
            } else {
                json c = {{"op", "policy_list"}};
                if (!list_principal.empty()) c["principal"] = list_principal;
                cmds.push_back(c);
            }
            auto responses = cli::apply_policy_commands(state, cmds);
            if (int rc = print_responses(responses)) return rc;
            if (*pol_list) {
                std::cout << responses.back()["data"].dump(2) << "\n";
                return 0;
            }
            cli::save_policy_state(state_path, state);
            for (const auto& r : responses)
                if (r["data"].is_object() && r["data"].contains("id"))
                    std::cout << "added " << r["data"]["id"].get<std::string>() << "\n";
            if (*pol_rm) std::cout << "removed " << policy_id << "\n";
            return 0;
        }

        if (*cal) {
            auto fx = partition::load_fixture(fixture_path);
            auto res = partition::calibrate(fx);
            write_file(model_out, partition::to_json(res.model).dump(2) + "\n");
            if (!residual_out.empty()) write_file(residual_out, partition::to_json(res).dump(2) + "\n");
            for (const auto& r : res.residuals)
                std::cout << (r.within ? "ok   " : "FAIL ") << r.id << "  observed " << r.observed << "  simulated "
                          << r.simulated << "  " << (r.relative ? "rel " : "abs ") << r.error << "\n";
            std::cout << "max relative error " << res.max_relative_error << " after " << res.iterations
                      << " iterations\n";
            if (!res.feasible) {
                std::cerr << "error: residuals exceed the " << fx.tolerance * 100 << "% tolerance\n";
                return kExitFailed;
            }
            return 0;
        }

        if (*st) {
            store::AppStore store(data_dir);
            if (*serve) {
                store::StoreServer server(store, token);
                g_server = &server;
                std::signal(SIGINT, on_signal);
                std::signal(SIGTERM, on_signal);
                std::cout << "serving " << data_dir << " on http://" << host << ":" << port << std::endl;
                server.serve_forever(host, port);
                g_server = nullptr;
                return 0;
            }
            if (*publish) {
                auto manifest = store::manifest_from_json(json::parse(slurp(manifest_path)));
                std::string payload = slurp(payload_path);
                auto pv = store.publish(app_id, Version::parse(version), manifest,
                                        std::vector<std::uint8_t>(payload.begin(), payload.end()));
                std::cout << app_id << " " << pv.version.str() << " " << pv.digest << "\n";
                return 0;
            }
            if (*alert) {
                store.upsert_alert(store::alert_from_json(json::parse(slurp(alert_path))));
                return 0;
            }
        }
    } catch (const cli::ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return 0;
}
