#include "smartcore/store/store.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include <openssl/evp.h>

namespace smartcore::store {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(const std::vector<std::uint8_t>& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw StoreError(StoreError::Code::Io, "SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

std::string base64_encode(const std::vector<std::uint8_t>& data) {
    std::string out(4 * ((data.size() + 2) / 3) + 1, '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(), static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) throw StoreError(StoreError::Code::Invalid, "base64 length must be a multiple of 4");
    std::vector<std::uint8_t> out(3 * text.size() / 4 + 1);
    int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (n < 0) throw StoreError(StoreError::Code::Invalid, "malformed base64");
    // EVP_DecodeBlock keeps the padding bytes as zeros.
    std::size_t pad = 0;
    if (!text.empty() && text.back() == '=') ++pad;
    if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw StoreError(StoreError::Code::Io, "cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& p) {
    auto b = read_bytes(p);
    return {b.begin(), b.end()};
}

// Write to a sibling temp file and rename, so readers never see a torn file.
void write_atomic(const fs::path& p, const std::string& content) {
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreError(StoreError::Code::Io, "cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, p);
}

void check_app_id(const std::string& id) {
    static const std::regex ok(R"([A-Za-z0-9][A-Za-z0-9._-]{0,63})");
    if (!std::regex_match(id, ok) || id.find("..") != std::string::npos)
        throw StoreError(StoreError::Code::Invalid, "invalid app id '" + id + "'");
}

}  // namespace

AppStore::AppStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / "apps", ec);
    if (ec) throw StoreError(StoreError::Code::Io, "cannot create store at " + root_.string() + ": " + ec.message());
}

fs::path AppStore::app_dir(const std::string& app_id) const {
    check_app_id(app_id);
    return root_ / "apps" / app_id;
}

PackageVersion AppStore::publish(const std::string& app_id, const Version& version, const Manifest& manifest,
                                 const std::vector<std::uint8_t>& payload) {
    std::lock_guard lock(mu_);
    fs::path dir = app_dir(app_id);
    if (fs::exists(dir)) {
        for (const auto& e : fs::directory_iterator(dir)) {
            if (!e.is_directory()) continue;
            Version existing = Version::parse(e.path().filename().string());
            if (!(version > existing))
                throw StoreError(StoreError::Code::Conflict, "version " + version.str() + " of '" + app_id +
                                                                 "' is not newer than published " + existing.str());
        }
    }
    PackageVersion pv{version, sha256_hex(payload), manifest};
    fs::path vdir = dir / version.str();
    fs::create_directories(vdir);
    write_atomic(vdir / "manifest.json", to_json(manifest).dump(2) + "\n");
    write_atomic(vdir / "payload.bin", std::string(payload.begin(), payload.end()));
    write_atomic(vdir / "digest", pv.digest + "\n");
    return pv;
}

std::vector<PackageRecord> AppStore::list_packages() const {
    std::lock_guard lock(mu_);
    std::vector<PackageRecord> out;
    fs::path apps = root_ / "apps";
    if (!fs::exists(apps)) return out;
    for (const auto& a : fs::directory_iterator(apps)) {
        if (!a.is_directory()) continue;
        PackageRecord rec{a.path().filename().string(), {}};
        for (const auto& v : fs::directory_iterator(a.path())) {
            if (!v.is_directory()) continue;
            PackageVersion pv;
            pv.version = Version::parse(v.path().filename().string());
            pv.manifest = manifest_from_json(json::parse(read_text(v.path() / "manifest.json")));
            std::string d = read_text(v.path() / "digest");
            pv.digest = d.substr(0, d.find_first_of("\r\n"));
            rec.versions.push_back(pv);
        }
        std::sort(rec.versions.begin(), rec.versions.end(),
                  [](const PackageVersion& l, const PackageVersion& r) { return l.version < r.version; });
        if (!rec.versions.empty()) out.push_back(std::move(rec));
    }
    std::sort(out.begin(), out.end(), [](const PackageRecord& l, const PackageRecord& r) { return l.app_id < r.app_id; });
    return out;
}

Package AppStore::get_package(const std::string& app_id, std::optional<Version> version) const {
    fs::path dir = app_dir(app_id);
    std::lock_guard lock(mu_);
    if (!fs::exists(dir)) throw StoreError(StoreError::Code::NotFound, "no app '" + app_id + "'");
    std::optional<Version> pick;
    for (const auto& v : fs::directory_iterator(dir)) {
        if (!v.is_directory()) continue;
        Version cur = Version::parse(v.path().filename().string());
        if (version ? cur == *version : (!pick || cur > *pick)) pick = cur;
    }
    if (!pick)
        throw StoreError(StoreError::Code::NotFound,
                         "no version " + (version ? version->str() + " " : std::string()) + "of app '" + app_id + "'");
    fs::path vdir = dir / pick->str();
    Package p;
    p.app_id = app_id;
    p.version = *pick;
    p.manifest = manifest_from_json(json::parse(read_text(vdir / "manifest.json")));
    p.payload = read_bytes(vdir / "payload.bin");
    std::string d = read_text(vdir / "digest");
    p.digest = d.substr(0, d.find_first_of("\r\n"));
    if (sha256_hex(p.payload) != p.digest)
        throw StoreError(StoreError::Code::Integrity,
                         "payload of '" + app_id + "' " + pick->str() + " does not match its recorded digest");
    return p;
}

std::vector<AlertRecord> AppStore::read_alerts() const {
    fs::path p = root_ / "alerts.json";
    std::vector<AlertRecord> out;
    if (!fs::exists(p)) return out;
    for (const auto& j : json::parse(read_text(p))) out.push_back(alert_from_json(j));
    return out;
}

void AppStore::write_alerts(const std::vector<AlertRecord>& alerts) const {
    json arr = json::array();
    for (const auto& a : alerts) arr.push_back(to_json(a));
    write_atomic(root_ / "alerts.json", arr.dump(2) + "\n");
}

void AppStore::upsert_alert(const AlertRecord& alert) {
    if (alert.plate.empty()) throw StoreError(StoreError::Code::Invalid, "alert plate must not be empty");
    std::lock_guard lock(mu_);
    auto all = read_alerts();
    auto it = std::find_if(all.begin(), all.end(), [&](const AlertRecord& a) { return a.plate == alert.plate; });
    if (it != all.end())
        *it = alert;
    else
        all.push_back(alert);
    write_alerts(all);
}

void AppStore::set_alert_active(const std::string& plate, bool active, double at) {
    std::lock_guard lock(mu_);
    auto all = read_alerts();
    auto it = std::find_if(all.begin(), all.end(), [&](const AlertRecord& a) { return a.plate == plate; });
    if (it == all.end()) throw StoreError(StoreError::Code::NotFound, "no alert for plate '" + plate + "'");
    it->active = active;
    it->issued_at = at;
    write_alerts(all);
}

std::vector<AlertRecord> AppStore::get_alerts(double since) const {
    std::lock_guard lock(mu_);
    std::vector<AlertRecord> out;
    for (auto& a : read_alerts())
        if (a.active && a.issued_at >= since) out.push_back(std::move(a));
    return out;
}

std::uint64_t AppStore::post_sighting(const SightingReport& report) {
    std::lock_guard lock(mu_);
    auto alerts = read_alerts();
    bool known = std::any_of(alerts.begin(), alerts.end(),
                             [&](const AlertRecord& a) { return a.active && a.plate == report.plate; });
    if (!known) throw StoreError(StoreError::Code::NotFound, "no active alert for plate '" + report.plate + "'");
    fs::path p = root_ / "sightings.jsonl";
    std::uint64_t lines = 0;
    if (fs::exists(p)) {
        std::ifstream in(p);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) ++lines;
    }
    std::ofstream out(p, std::ios::app);
    if (!out) throw StoreError(StoreError::Code::Io, "cannot append to " + p.string());
    out << to_json(report).dump() << '\n';
    return lines + 1;
}

std::vector<SightingReport> AppStore::sightings() const {
    std::lock_guard lock(mu_);
    std::vector<SightingReport> out;
    std::ifstream in(root_ / "sightings.jsonl");
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(sighting_from_json(json::parse(line)));
    return out;
}

}  // namespace smartcore::store
