#include <thread>

#include <gtest/gtest.h>

#include "smartcore/policy/context.hpp"
#include "smartcore/policy/policy.hpp"
#include "smartcore/policy/policy_io.hpp"
#include "smartcore/policy/policy_store.hpp"

using namespace smartcore;
using namespace smartcore::policy;
using nlohmann::json;

namespace {

const Principal kIns{"ins", PrincipalKind::Dongle, "", profile::kInsurance};
const Principal kProt{"prot", PrincipalKind::Application, "", profile::kProtection};
const Principal kDiag{"diag", PrincipalKind::Dongle, "", profile::kDiagnostic};

bool allowed(const Principal& p, obd::Pid pid, const ContextSnapshot& ctx, const std::vector<Policy>& pols) {
    return evaluate({p.id, pid, SimTime::zero()}, p, ctx, pols).allowed();
}

Policy user(const std::string& id, const Principal& p, Resource r, Effect e, int prio, ContextPredicate c = {}) {
    Policy pol;
    pol.id = id;
    pol.selector.principal_id = p.id;
    pol.resources = {r};
    pol.context = c;
    pol.effect = e;
    pol.priority = prio;
    return pol;
}

}  // namespace

TEST(Context, AllSnapshotsDistinct) {
    auto all = all_contexts();
    ASSERT_EQ(all.size(), 64u);
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) EXPECT_FALSE(all[i] == all[j]);
}

TEST(Context, MovingNeedsDebounce) {
    vehicle::DrivingTrace t("t", {{0, 0, {}}, {10, 30, {}}, {20, 0, {}}, {30, 0, {}}});
    vehicle::SignalTimeline sig;
    LocationRegistry reg;
    EXPECT_EQ(recognize_context(t, sig, {}, reg, 11).vehicle_status, VehicleStatus::Idle);
    EXPECT_EQ(recognize_context(t, sig, {}, reg, 12).vehicle_status, VehicleStatus::Moving);
    EXPECT_EQ(recognize_context(t, sig, {}, reg, 20).vehicle_status, VehicleStatus::Idle);
}

TEST(Context, SignalsAndLocation) {
    vehicle::DrivingTrace t("t", {{0, 0, {}}, {100, 0, {}}});
    vehicle::SignalTimeline sig;
    sig.add({vehicle::EventKind::CheckEngineOn, 5});
    sig.add({vehicle::EventKind::Collision, 50});
    LocationRegistry reg({{"home", LocationClass::Home, {47.0, -122.0}, 100}});
    auto c = recognize_context(t, sig, vehicle::GeoPoint{47.0005, -122.0}, reg, 60);
    EXPECT_EQ(c.health, Health::Fault);
    EXPECT_TRUE(c.emergency);
    EXPECT_EQ(c.location_class, LocationClass::Home);
    c = recognize_context(t, sig, vehicle::GeoPoint{47.01, -122.0}, reg, 1);
    EXPECT_EQ(c.location_class, LocationClass::Other);
    EXPECT_EQ(c.health, Health::Ok);
}

TEST(Context, Haversine) {
    EXPECT_NEAR(haversine_m({0, 0}, {0, 1}), 111195.0, 10.0);
    EXPECT_THROW(LocationRegistry().add({"x", LocationClass::Home, {0, 0}, 0}), std::invalid_argument);
}

TEST(Resource, Matching) {
    EXPECT_TRUE(Resource::pid(0x0D).matches(obd::live(0x0D)));
    EXPECT_FALSE(Resource::pid(0x0D).matches({obd::service::kReadDtc, 0x0D}));
    EXPECT_TRUE(Resource::operation("live_data").matches(obd::live(0x42)));
    EXPECT_TRUE(Resource::operation("write").matches({0x2E, 0}));
    EXPECT_TRUE(Resource::operation("clear_dtc").matches({obd::service::kClearDtc, 0}));
    EXPECT_TRUE(Resource::any().matches({0x7F, 0}));
    EXPECT_EQ(parse_resource("0x0d"), Resource::pid(0x0D));
    EXPECT_ANY_THROW(parse_resource("fly"));
    EXPECT_THROW(parse_resource("04:00"), std::invalid_argument);
}

TEST(Evaluate, NoMatchDenies) {
    auto d = evaluate({"x", obd::live(0x0D), SimTime::zero()}, kIns, {}, {});
    EXPECT_FALSE(d.allowed());
}

TEST(Evaluate, HigherPriorityWinsDenyWinsTies) {
    std::vector<Policy> pols{user("a", kIns, Resource::pid(0x0C), Effect::Allow, 100),
                             user("b", kIns, Resource::pid(0x0C), Effect::Deny, 50)};
    EXPECT_TRUE(allowed(kIns, obd::live(0x0C), {}, pols));
    pols.push_back(user("c", kIns, Resource::pid(0x0C), Effect::Deny, 100));
    auto d = evaluate({"ins", obd::live(0x0C), SimTime::zero()}, kIns, {}, pols);
    EXPECT_FALSE(d.allowed());
    EXPECT_EQ(d.policy_id, "c");
}

TEST(Predefined, Insurance) {
    auto pols = derive_predefined_policies({}, kIns);
    for (const auto& ctx : all_contexts()) {
        EXPECT_TRUE(allowed(kIns, obd::live(obd::kSpeedPid), ctx, pols));
        EXPECT_TRUE(allowed(kIns, obd::live(obd::kOdometerPid), ctx, pols));
        EXPECT_FALSE(allowed(kIns, obd::live(obd::kRpmPid), ctx, pols));
        EXPECT_FALSE(allowed(kIns, {obd::service::kClearDtc, 0}, ctx, pols));
    }
}

TEST(Predefined, ProtectionAndDiagnostic) {
    auto prot = derive_predefined_policies({}, kProt);
    EXPECT_TRUE(allowed(kProt, obd::live(obd::kRpmPid), {}, prot));
    EXPECT_FALSE(allowed(kProt, {obd::service::kControl, 1}, {}, prot));
    auto diag = derive_predefined_policies({}, kDiag);
    EXPECT_FALSE(allowed(kDiag, obd::live(obd::kRpmPid), {}, diag));
    Principal odd{"odd", PrincipalKind::Dongle, "", "mystery"};
    EXPECT_FALSE(allowed(odd, obd::live(obd::kSpeedPid), {}, derive_predefined_policies({}, odd)));
}

TEST(Predefined, QuirkDeniesDonglesWhileMoving) {
    vehicle::VehicleProfile vp;
    vp.quirks = {vehicle::kQuirkDenyAllWhileMoving};
    auto pols = derive_predefined_policies(vp, kIns);
    ContextSnapshot moving;
    moving.vehicle_status = VehicleStatus::Moving;
    EXPECT_FALSE(allowed(kIns, obd::live(obd::kSpeedPid), moving, pols));
    EXPECT_TRUE(allowed(kIns, obd::live(obd::kSpeedPid), {}, pols));
    pols.push_back(user("u", kIns, Resource::pid(obd::kSpeedPid), Effect::Allow, band::kUserMax));
    EXPECT_FALSE(allowed(kIns, obd::live(obd::kSpeedPid), moving, pols));
}

TEST(Evaluate, ContextPredicate) {
    ContextPredicate fault;
    fault.health = Health::Fault;
    auto pols = derive_predefined_policies({}, kDiag);
    pols.push_back(user("f", kDiag, Resource::operation("read_dtc"), Effect::Allow, 100, fault));
    ContextSnapshot ctx;
    EXPECT_FALSE(allowed(kDiag, {obd::service::kReadDtc, 0}, ctx, pols));
    ctx.health = Health::Fault;
    EXPECT_TRUE(allowed(kDiag, {obd::service::kReadDtc, 0}, ctx, pols));
}

TEST(Store, PredefinedAreImmutable) {
    PolicyStore s;
    s.install_predefined("ins", derive_predefined_policies({}, kIns));
    auto pre = s.list("ins");
    ASSERT_FALSE(pre.empty());
    EXPECT_THROW(s.remove(pre.front().id), PolicyError);
    auto edited = pre.front();
    edited.effect = Effect::Allow;
    EXPECT_THROW(s.edit(edited), PolicyError);
}

TEST(Store, UserLifecycleBumpsVersion) {
    PolicyStore s;
    auto v0 = s.version();
    auto id = s.add(user("", kIns, Resource::pid(0x0C), Effect::Allow, 100));
    EXPECT_FALSE(id.empty());
    EXPECT_GT(s.version(), v0);
    auto p = s.list("ins").front();
    p.priority = 200;
    s.edit(p);
    EXPECT_EQ(s.list("ins").front().priority, 200);
    s.remove(id);
    EXPECT_TRUE(s.list("ins").empty());
    EXPECT_THROW(s.remove(id), PolicyError);
}

TEST(Store, UserPriorityBand) {
    PolicyStore s;
    EXPECT_THROW(s.add(user("", kIns, Resource::pid(0x0C), Effect::Allow, band::kSafety)), PolicyError);
    EXPECT_THROW(s.add(user("", kIns, Resource::pid(0x0C), Effect::Allow, 0)), PolicyError);
    s.add(user("dup", kIns, Resource::pid(0x0C), Effect::Allow, 100));
    EXPECT_THROW(s.add(user("dup", kIns, Resource::pid(0x0C), Effect::Allow, 100)), PolicyError);
}

TEST(Store, SnapshotsAreStableUnderWriters) {
    PolicyStore s;
    s.install_predefined("ins", derive_predefined_policies({}, kIns));
    auto snap = s.snapshot();
    auto size = snap->size();
    std::thread w([&] {
        for (int i = 0; i < 200; ++i) s.add(user("", kIns, Resource::pid(0x0C), Effect::Allow, 100));
    });
    for (int i = 0; i < 200; ++i) EXPECT_GE(s.snapshot()->size(), size);
    w.join();
    EXPECT_EQ(snap->size(), size);
    EXPECT_EQ(s.snapshot()->size(), size + 200);
}

TEST(Io, DocumentRoundTrip) {
    json j = {{"principal", "garage"},
              {"kind", "dongle"},
              {"profile", "diagnostic"},
              {"policies",
               {{{"id", "p1"},
                 {"resource", {"read_dtc", "0x05"}},
                 {"context", {{"health", "fault"}}},
                 {"effect", "allow"},
                 {"priority", 150}}}},
              {"response_transform", {{"alg", "noise"}, {"R_uniform", 20}, {"seed", 7}}}};
    auto d = parse_policy_document(j);
    EXPECT_EQ(d.principal, "garage");
    ASSERT_EQ(d.policies.size(), 1u);
    EXPECT_EQ(d.policies[0].selector.principal_id, "garage");
    EXPECT_EQ(d.policies[0].resources.size(), 2u);
    EXPECT_EQ(d.policies[0].context.health, Health::Fault);
    ASSERT_TRUE(d.response_transform);
    EXPECT_EQ(d.response_transform->alg, privacy::Algorithm::Noise);
    auto again = parse_policy_document(to_json(d));
    EXPECT_EQ(again.policies, d.policies);
}

TEST(Io, RejectsBadDocuments) {
    EXPECT_THROW(parse_policy_document(json{{"policies", json::array()}}), std::exception);
    json bad = {{"principal", "x"}, {"policies", {{{"resource", {"0x0D"}}, {"effect", "maybe"}}}}};
    EXPECT_THROW(parse_policy_document(bad), std::exception);
}
