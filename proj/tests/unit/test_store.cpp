#include <filesystem>
#include <fstream>
#include <thread>

#include <unistd.h>

#include <gtest/gtest.h>
#include <httplib.h>

#include "smartcore/store/http_server.hpp"
#include "smartcore/store/store.hpp"

using namespace smartcore;
using namespace smartcore::store;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("smartcore_store_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<std::uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }

Manifest manifest(const std::string& profile = "protection") {
    Manifest m;
    m.profile = profile;
    m.resource_needs = {"camera"};
    return m;
}

}  // namespace

TEST(Digest, KnownVectors) {
    EXPECT_EQ(sha256_hex({}), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex(bytes("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Base64, RoundTrip) {
    for (std::string s : {"", "f", "fo", "foo", "foob", "fooba", "foobar"}) {
        auto enc = base64_encode(bytes(s));
        EXPECT_EQ(base64_decode(enc), bytes(s)) << s;
    }
    EXPECT_EQ(base64_encode(bytes("foobar")), "Zm9vYmFy");
    EXPECT_THROW(base64_decode("abc"), StoreError);
}

TEST(AppStore, PublishAndFetch) {
    TempDir d;
    AppStore s(d.path);
    auto pv = s.publish("amber", Version::parse("1.0"), manifest(), bytes("payload-1"));
    EXPECT_EQ(pv.digest, sha256_hex(bytes("payload-1")));
    s.publish("amber", Version::parse("1.2"), manifest(), bytes("payload-2"));
    auto latest = s.get_package("amber");
    EXPECT_EQ(latest.version, Version::parse("1.2"));
    EXPECT_EQ(latest.payload, bytes("payload-2"));
    auto old = s.get_package("amber", Version::parse("1.0"));
    EXPECT_EQ(old.payload, bytes("payload-1"));
    auto list = s.list_packages();
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0].versions.size(), 2u);
}

TEST(AppStore, Errors) {
    TempDir d;
    AppStore s(d.path);
    s.publish("a", Version::parse("2.0"), manifest(), bytes("x"));
    auto code = [](auto fn) {
        try {
            fn();
        } catch (const StoreError& e) {
            return e.code();
        }
        return StoreError::Code::Io;
    };
    EXPECT_EQ(code([&] { s.publish("a", Version::parse("2.0"), manifest(), bytes("y")); }), StoreError::Code::Conflict);
    EXPECT_EQ(code([&] { s.publish("a", Version::parse("1.0"), manifest(), bytes("y")); }), StoreError::Code::Conflict);
    EXPECT_EQ(code([&] { s.get_package("missing"); }), StoreError::Code::NotFound);
    EXPECT_EQ(code([&] { s.get_package("a", Version::parse("3.0")); }), StoreError::Code::NotFound);
    EXPECT_EQ(code([&] { s.get_package("../etc"); }), StoreError::Code::Invalid);
}

TEST(AppStore, DetectsTamperedPayload) {
    TempDir d;
    AppStore s(d.path);
    s.publish("a", Version::parse("1.0"), manifest(), bytes("good"));
    std::ofstream(d.path / "apps" / "a" / "1.0.0" / "payload.bin", std::ios::trunc) << "evil";
    try {
        s.get_package("a");
        FAIL();
    } catch (const StoreError& e) {
        EXPECT_EQ(e.code(), StoreError::Code::Integrity);
    }
}

TEST(AppStore, AlertsAndSightings) {
    TempDir d;
    AppStore s(d.path);
    s.upsert_alert({"honda", "civic", "red", "ABC123", true, 100});
    s.upsert_alert({"ford", "focus", "blue", "XYZ789", true, 200});
    EXPECT_EQ(s.get_alerts(0).size(), 2u);
    EXPECT_EQ(s.get_alerts(150).size(), 1u);
    s.upsert_alert({"honda", "civic", "white", "ABC123", true, 300});
    auto all = s.get_alerts(0);
    EXPECT_EQ(all.size(), 2u);
    s.set_alert_active("XYZ789", false, 400);
    EXPECT_EQ(s.get_alerts(0).size(), 1u);
    EXPECT_THROW(s.upsert_alert({"", "", "", "", true, 0}), StoreError);

    EXPECT_EQ(s.post_sighting({"ABC123", 47.6, -122.3, 500}), 1u);
    EXPECT_EQ(s.post_sighting({"ABC123", 47.7, -122.3, 501}), 2u);
    EXPECT_THROW(s.post_sighting({"XYZ789", 0, 0, 0}), StoreError);
    EXPECT_EQ(s.sightings().size(), 2u);
}

TEST(AppStore, ConcurrentSightingsKeepEveryLine) {
    TempDir d;
    AppStore s(d.path);
    s.upsert_alert({"m", "m", "c", "P1", true, 0});
    std::vector<std::thread> ts;
    for (int t = 0; t < 4; ++t)
        ts.emplace_back([&] {
            for (int i = 0; i < 25; ++i) s.post_sighting({"P1", 0, 0, static_cast<double>(i)});
        });
    for (auto& t : ts) t.join();
    EXPECT_EQ(s.sightings().size(), 100u);
}

class HttpTest : public ::testing::Test {
protected:
    TempDir dir;
    AppStore store{dir.path};
    StoreServer server{store, "secret"};
    int port = 0;

    void SetUp() override {
        store.publish("amber", Version::parse("1.0"), manifest(), bytes("bin"));
        store.upsert_alert({"honda", "civic", "red", "ABC123", true, 100});
        port = server.start("127.0.0.1", 0);
    }
    void TearDown() override { server.stop(); }

    httplib::Client client(const std::string& token = "secret") {
        httplib::Client c("127.0.0.1", port);
        if (!token.empty()) c.set_bearer_token_auth(token);
        return c;
    }
};

TEST_F(HttpTest, ListAndFetch) {
    auto c = client();
    auto r = c.Get("/apps");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    auto list = json::parse(r->body);
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0]["app_id"], "amber");
    r = c.Get("/apps/amber?version=latest");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    auto pkg = json::parse(r->body);
    EXPECT_EQ(base64_decode(pkg["payload_b64"]), bytes("bin"));
    EXPECT_EQ(pkg["digest"], sha256_hex(bytes("bin")));
    EXPECT_EQ(c.Get("/apps/nope")->status, 404);
    EXPECT_EQ(c.Get("/apps/amber?version=9.9")->status, 404);
}

TEST_F(HttpTest, AlertsAndSightings) {
    auto c = client();
    auto r = c.Get("/alerts?since=0");
    ASSERT_TRUE(r);
    EXPECT_EQ(json::parse(r->body).size(), 1u);
    EXPECT_EQ(c.Get("/alerts?since=abc")->status, 400);
    r = c.Post("/sightings", R"({"plate":"ABC123","lat":1,"lon":2,"reported_at":3})", "application/json");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 200);
    EXPECT_EQ(json::parse(r->body)["seq"], 1);
    EXPECT_EQ(c.Post("/sightings", "{not json", "application/json")->status, 400);
    EXPECT_EQ(c.Post("/sightings", R"({"plate":"NOPE","lat":1,"lon":2,"reported_at":3})", "application/json")->status,
              404);
}

TEST_F(HttpTest, RequiresToken) {
    EXPECT_EQ(client("").Get("/apps")->status, 401);
    EXPECT_EQ(client("wrong").Get("/apps")->status, 401);
}
