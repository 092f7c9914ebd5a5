#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smartcore/obd/catalog.hpp"

namespace smartcore::obd {

std::vector<std::uint8_t> encode_value(const PidCatalog& catalog, Pid pid, double value);
PhysicalValue decode_value(const PidCatalog& catalog, Pid pid, std::span<const std::uint8_t> raw);

inline std::vector<std::uint8_t> encode_value(Pid pid, double value) {
    return encode_value(PidCatalog::standard(), pid, value);
}
inline PhysicalValue decode_value(Pid pid, std::span<const std::uint8_t> raw) {
    return decode_value(PidCatalog::standard(), pid, raw);
}

/// Saturating variant used when re-encoding transformed values: clamps to
/// the representable range instead of throwing.
std::vector<std::uint8_t> encode_clamped(const PidCatalog& catalog, Pid pid, double value);

std::optional<PidCatalogEntry> catalog_lookup(Pid pid);

}  // namespace smartcore::obd
