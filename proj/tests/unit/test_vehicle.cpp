#include <sstream>

#include <gtest/gtest.h>

#include "smartcore/vehicle/trace.hpp"
#include "smartcore/vehicle/vehicle.hpp"

using namespace smartcore;
using namespace smartcore::vehicle;

namespace {

DrivingTrace ramp() { return DrivingTrace("ramp", {{0, 0, {}}, {10, 36, {}}, {20, 72, {}}, {30, 0, {}}}); }

}  // namespace

TEST(Trace, ZeroOrderHold) {
    auto t = ramp();
    EXPECT_DOUBLE_EQ(t.speed_at(0), 0.0);
    EXPECT_DOUBLE_EQ(t.speed_at(15), 36.0);
    EXPECT_DOUBLE_EQ(t.speed_at(20), 72.0);
    EXPECT_DOUBLE_EQ(t.distance_km_at(20), 0.1);
    EXPECT_DOUBLE_EQ(t.distance_km_at(30), 0.3);
}

TEST(Trace, DistanceIsAdditive) {
    auto t = ramp();
    double whole = t.distance_km_at(30);
    double a = t.distance_km_at(12.5);
    EXPECT_NEAR(whole - a, t.distance_km_at(30) - t.distance_km_at(12.5), 1e-12);
    EXPECT_NEAR(t.distance_km_at(17) - t.distance_km_at(12.5), 36.0 * 4.5 / 3600.0, 1e-12);
}

TEST(Trace, Validation) {
    EXPECT_THROW(DrivingTrace("x", {{0, 0, {}}}), TraceError);
    EXPECT_THROW(DrivingTrace("x", {{0, 0, {}}, {0, 1, {}}}), TraceError);
    EXPECT_THROW(DrivingTrace("x", {{0, 0, {}}, {1, -1, {}}}), TraceError);
}

TEST(Trace, CsvLoadReportsLine) {
    std::istringstream ok("t_s,speed_kmh,lat,lon\n0,0,47.6,-122.3\n1,10,47.6001,-122.3\n");
    auto t = load_trace(ok);
    EXPECT_TRUE(t.has_position());
    EXPECT_DOUBLE_EQ(t.speed_at(1), 10.0);
    std::istringstream bad("t_s,speed_kmh\n0,0\n1,abc\n");
    try {
        load_trace(bad);
        FAIL();
    } catch (const TraceError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Signals, Latches) {
    SignalTimeline s(100);
    s.add({EventKind::CheckEngineOn, 10});
    s.add({EventKind::CheckEngineOff, 20});
    s.add({EventKind::Collision, 30});
    s.add({EventKind::LawEnforcementAlert, 40});
    EXPECT_FALSE(s.check_engine_at(5));
    EXPECT_TRUE(s.check_engine_at(15));
    EXPECT_FALSE(s.check_engine_at(25));
    EXPECT_FALSE(s.emergency_at(29));
    EXPECT_TRUE(s.emergency_at(1000));
    EXPECT_TRUE(s.alert_active_at(139));
    EXPECT_FALSE(s.alert_active_at(141));
}

TEST(Signals, ParseEvents) {
    auto e = parse_events(R"([{"kind":"check_engine_on","at":3}])");
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e[0].kind, EventKind::CheckEngineOn);
    EXPECT_THROW(parse_events(R"([{"kind":"bogus","at":3}])"), std::exception);
}

TEST(Arbitration, LowestCodeThenEarliest) {
    std::vector<obd::ObdRequest> p{{"a", obd::live(0x0D), SimTime::from_ns(5)},
                                   {"b", obd::live(0x0C), SimTime::from_ns(9)},
                                   {"c", obd::live(0x0C), SimTime::from_ns(2)},
                                   {"d", obd::live(0x0C), SimTime::from_ns(2)}};
    EXPECT_EQ(bus_arbitrate(p), 2u);
}

TEST(Vehicle, AnswersFromTrace) {
    VirtualVehicle v(ramp(), VehicleProfile{});
    auto r = v.query(obd::live(obd::kSpeedPid), 15);
    EXPECT_DOUBLE_EQ(r.value.value, 36.0);
    EXPECT_EQ(r.raw, (std::vector<std::uint8_t>{36}));
    EXPECT_EQ(v.service_count(), 0u);
    v.serve({"x", obd::live(obd::kSpeedPid), SimTime::zero()}, 15);
    EXPECT_EQ(v.service_count(), 1u);
}

TEST(Vehicle, UnsupportedAndOutOfSpan) {
    VehicleProfile prof;
    prof.supported_pids = {obd::kSpeedPid};
    VirtualVehicle v(ramp(), prof);
    EXPECT_FALSE(v.supports(obd::live(obd::kRpmPid)));
    EXPECT_THROW(v.query(obd::live(obd::kRpmPid), 1), VehicleError);
    try {
        v.query(obd::live(obd::kSpeedPid), 31);
        FAIL();
    } catch (const VehicleError& e) {
        EXPECT_EQ(e.code(), VehicleError::Code::OutOfSpan);
    }
}

TEST(Vehicle, ClearDtcResetsCheckEngine) {
    VirtualVehicle v(ramp(), VehicleProfile{});
    v.inject_event({EventKind::CheckEngineOn, 1});
    EXPECT_TRUE(v.signals().check_engine_at(5));
    v.serve({"x", {obd::service::kClearDtc, 0}, SimTime::from_seconds(5)}, 5);
    EXPECT_FALSE(v.signals().check_engine_at(6));
}

TEST(Vehicle, OdometerAdvances) {
    VehicleProfile prof;
    prof.initial_odometer_km = 1000;
    VirtualVehicle v(ramp(), prof);
    double a = v.query(obd::live(obd::kOdometerPid), 0).value.value;
    double b = v.query(obd::live(obd::kOdometerPid), 30).value.value;
    EXPECT_NEAR(a, 1000.0, 0.1);
    EXPECT_NEAR(b - a, 0.3, 0.1);
}
