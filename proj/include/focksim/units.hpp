#pragma once
#include <string>

namespace focksim {

/// Dimension families accepted in configs. Each family has one base unit;
/// bare numbers are interpreted in that base unit.
enum class UnitKind {
  kTime,              // base: s
  kAngle,             // base: rad
  kAngularFrequency,  // base: rad/s ("GHz" etc. convert ordinary frequency x 2pi)
  kRate,              // base: 1/s (linear, no 2pi)
  kLossDb,            // base: dB
  kLossDbPerKm,       // base: dB/km
  kLengthKm,          // base: km
  kTimePerKm,         // base: s/km
  kDimensionless,
};

const char* unit_base_name(UnitKind kind);

/// Parses "<number> <unit>" (or a bare number string) into the base unit of
/// `kind`. Throws ConfigError naming `where` on an unknown or mismatched
/// suffix.
double parse_quantity(const std::string& text, UnitKind kind,
                      const std::string& where);

}  // namespace focksim
