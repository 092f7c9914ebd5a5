#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smartcore/obd/pid.hpp"

namespace smartcore::obd {

enum class FormulaKind {
    Affine,        // value = scale * uint_be(raw) + offset
    AffineSigned,  // value = scale * int_be(raw) + offset (two's complement)
};

struct DecodeFormula {
    FormulaKind kind = FormulaKind::Affine;
    double scale = 1.0;
    double offset = 0.0;
};

struct PidCatalogEntry {
    Pid pid;
    std::string name;
    std::string unit;
    std::size_t payload_len = 1;
    DecodeFormula formula;

    /// Smallest representable change of the physical value.
    double quantum() const;
    double min_value() const;
    double max_value() const;
};

/// Mode-0x01 PID table.
///
/// Text format, one record per line, '#' starts a comment:
///
///     code,name,unit,payload_len,kind,scale,offset
///     0x0C,engine speed,rpm,2,affine,1/4,0
///
/// `kind` is `affine` or `affine_signed`; `scale` may be a decimal or a
/// rational `num/den`.
class PidCatalog {
public:
    PidCatalog() = default;
    explicit PidCatalog(std::vector<PidCatalogEntry> entries);

    static PidCatalog parse(std::istream& in);
    static PidCatalog load(const std::string& path);

    /// Built-in table of standard SAE J1979 mode-0x01 formulas.
    static const PidCatalog& standard();

    std::optional<PidCatalogEntry> lookup(Pid pid) const;
    const PidCatalogEntry& at(Pid pid) const;  // throws ObdError::UnknownPid
    bool contains(Pid pid) const { return entries_.count(pid.code) && pid.mode == service::kLiveData; }

    /// Entries ordered by code (ascending = bus priority order).
    std::vector<PidCatalogEntry> entries() const;
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::uint8_t, PidCatalogEntry> entries_;
};

}  // namespace smartcore::obd
