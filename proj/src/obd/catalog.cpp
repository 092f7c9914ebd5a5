#include "smartcore/obd/catalog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace smartcore::obd {

namespace {

// Kept identical to data/pid_catalog.csv (checked by the catalog tests).
constexpr const char* kStandardCatalog = R"(
0x00,supported pids 01-20,bitmask,4,affine,1,0
0x04,calculated engine load,%,1,affine,100/255,0
0x05,engine coolant temperature,degC,1,affine,1,-40
0x06,short term fuel trim bank 1,%,1,affine,100/128,-100
0x07,long term fuel trim bank 1,%,1,affine,100/128,-100
0x08,short term fuel trim bank 2,%,1,affine,100/128,-100
0x09,long term fuel trim bank 2,%,1,affine,100/128,-100
0x0A,fuel pressure,kPa,1,affine,3,0
0x0B,intake manifold absolute pressure,kPa,1,affine,1,0
0x0C,engine speed,rpm,2,affine,1/4,0
0x0D,vehicle speed,km/h,1,affine,1,0
0x0E,timing advance,deg,1,affine,1/2,-64
0x0F,intake air temperature,degC,1,affine,1,-40
0x10,mass air flow rate,g/s,2,affine,1/100,0
0x11,throttle position,%,1,affine,100/255,0
0x1F,run time since engine start,s,2,affine,1,0
0x20,supported pids 21-40,bitmask,4,affine,1,0
0x21,distance traveled with mil on,km,2,affine,1,0
0x22,fuel rail pressure relative to manifold vacuum,kPa,2,affine,0.079,0
0x23,fuel rail gauge pressure,kPa,2,affine,10,0
0x2C,commanded egr,%,1,affine,100/255,0
0x2F,fuel tank level input,%,1,affine,100/255,0
0x30,warm-ups since codes cleared,count,1,affine,1,0
0x31,distance traveled since codes cleared,km,2,affine,1,0
0x32,evap system vapor pressure,Pa,2,affine_signed,1/4,0
0x33,absolute barometric pressure,kPa,1,affine,1,0
0x40,supported pids 41-60,bitmask,4,affine,1,0
0x42,control module voltage,V,2,affine,1/1000,0
0x43,absolute load value,%,2,affine,100/255,0
0x44,commanded air-fuel equivalence ratio,ratio,2,affine,2/65536,0
0x45,relative throttle position,%,1,affine,100/255,0
0x46,ambient air temperature,degC,1,affine,1,-40
0x47,absolute throttle position b,%,1,affine,100/255,0
0x49,accelerator pedal position d,%,1,affine,100/255,0
0x4C,commanded throttle actuator,%,1,affine,100/255,0
0x4D,time run with mil on,min,2,affine,1,0
0x4E,time since trouble codes cleared,min,2,affine,1,0
0x52,ethanol fuel percentage,%,1,affine,100/255,0
0x5A,relative accelerator pedal position,%,1,affine,100/255,0
0x5B,hybrid battery pack remaining life,%,1,affine,100/255,0
0x5C,engine oil temperature,degC,1,affine,1,-40
0x5E,engine fuel rate,L/h,2,affine,1/20,0
0xA6,odometer,km,4,affine,1/10,0
)";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, std::size_t line) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return std::stod(text);
        const double num = std::stod(text.substr(0, slash));
        const double den = std::stod(text.substr(slash + 1));
        if (den == 0.0) throw std::invalid_argument("zero denominator");
        return num / den;
    } catch (const std::exception&) {
        throw ObdError(ObdError::Code::Parse,
                       "catalog line " + std::to_string(line) + ": bad number '" + text + "'");
    }
}

}  // namespace

double PidCatalogEntry::quantum() const { return std::abs(formula.scale); }

double PidCatalogEntry::min_value() const {
    const double bits = 8.0 * static_cast<double>(payload_len);
    if (formula.kind == FormulaKind::AffineSigned) return formula.offset - formula.scale * std::exp2(bits - 1);
    return formula.offset;
}

double PidCatalogEntry::max_value() const {
    const double bits = 8.0 * static_cast<double>(payload_len);
    if (formula.kind == FormulaKind::AffineSigned)
        return formula.offset + formula.scale * (std::exp2(bits - 1) - 1);
    return formula.offset + formula.scale * (std::exp2(bits) - 1);
}

PidCatalog::PidCatalog(std::vector<PidCatalogEntry> entries) {
    for (auto& e : entries) {
        const auto code = e.pid.code;
        entries_[code] = std::move(e);
    }
}

PidCatalog PidCatalog::parse(std::istream& in) {
    std::vector<PidCatalogEntry> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (fields.size() != 7)
            throw ObdError(ObdError::Code::Parse, "catalog line " + std::to_string(lineno) +
                                                      ": expected 7 fields, got " +
                                                      std::to_string(fields.size()));

        PidCatalogEntry e;
        try {
            e.pid = live(static_cast<std::uint8_t>(std::stoul(fields[0], nullptr, 16)));
            e.payload_len = std::stoul(fields[3]);
        } catch (const std::exception&) {
            throw ObdError(ObdError::Code::Parse, "catalog line " + std::to_string(lineno) + ": bad code/length");
        }
        e.name = fields[1];
        e.unit = fields[2];
        if (e.payload_len < 1 || e.payload_len > 4)
            throw ObdError(ObdError::Code::Parse, "catalog line " + std::to_string(lineno) + ": payload_len must be 1..4");
        if (fields[4] == "affine") {
            e.formula.kind = FormulaKind::Affine;
        } else if (fields[4] == "affine_signed") {
            e.formula.kind = FormulaKind::AffineSigned;
        } else {
            throw ObdError(ObdError::Code::Parse,
                           "catalog line " + std::to_string(lineno) + ": unknown formula kind '" + fields[4] + "'");
        }
        e.formula.scale = parse_number(fields[5], lineno);
        e.formula.offset = parse_number(fields[6], lineno);
        if (e.formula.scale == 0.0)
            throw ObdError(ObdError::Code::Parse, "catalog line " + std::to_string(lineno) + ": zero scale");
        out.push_back(std::move(e));
    }
    return PidCatalog(std::move(out));
}

PidCatalog PidCatalog::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ObdError(ObdError::Code::Parse, "cannot open catalog " + path);
    return parse(in);
}

const PidCatalog& PidCatalog::standard() {
    static const PidCatalog catalog = [] {
        std::istringstream in(kStandardCatalog);
        return parse(in);
    }();
    return catalog;
}

std::optional<PidCatalogEntry> PidCatalog::lookup(Pid pid) const {
    if (pid.mode != service::kLiveData) return std::nullopt;
    const auto it = entries_.find(pid.code);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

const PidCatalogEntry& PidCatalog::at(Pid pid) const {
    const auto it = entries_.find(pid.code);
    if (pid.mode != service::kLiveData || it == entries_.end())
        throw ObdError(ObdError::Code::UnknownPid, "unknown PID " + to_string(pid));
    return it->second;
}

std::vector<PidCatalogEntry> PidCatalog::entries() const {
    std::vector<PidCatalogEntry> out;
    out.reserve(entries_.size());
    for (const auto& [code, e] : entries_) out.push_back(e);
    return out;
}

}  // namespace smartcore::obd
