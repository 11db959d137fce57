#include "focksim/units.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "focksim/errors.hpp"

namespace focksim {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Suffix {
  const char* name;
  double factor;
};

// Conversion factors into the base unit of each family.
const std::vector<Suffix>& suffixes_for(UnitKind kind) {
  static const std::vector<Suffix> time = {
      {"s", 1.0},   {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6},
      {"ns", 1e-9}, {"ps", 1e-12}, {"fs", 1e-15}};
  static const std::vector<Suffix> angle = {
      {"rad", 1.0}, {"mrad", 1e-3}, {"deg", std::numbers::pi / 180.0}};
  // Hz-family suffixes denote ordinary frequency and convert with 2pi;
  // rad/s-family suffixes (and the bare "G" shorthand) are already angular.
  static const std::vector<Suffix> angular_frequency = {
      {"rad/s", 1.0},  {"krad/s", 1e3},      {"Mrad/s", 1e6},
      {"Grad/s", 1e9}, {"Trad/s", 1e12},     {"G", 1e9},
      {"Hz", kTwoPi},  {"kHz", kTwoPi * 1e3}, {"MHz", kTwoPi * 1e6},
      {"GHz", kTwoPi * 1e9}, {"THz", kTwoPi * 1e12}};
  static const std::vector<Suffix> rate = {{"/s", 1.0},   {"1/s", 1.0},
                                           {"Hz", 1.0},   {"kHz", 1e3},
                                           {"MHz", 1e6},  {"GHz", 1e9}};
  static const std::vector<Suffix> loss_db = {{"dB", 1.0}};
  static const std::vector<Suffix> loss_db_per_km = {{"dB/km", 1.0}};
  static const std::vector<Suffix> length_km = {{"km", 1.0}, {"m", 1e-3}};
  static const std::vector<Suffix> time_per_km = {{"s/km", 1.0},
                                                  {"ms/km", 1e-3},
                                                  {"us/km", 1e-6},
                                                  {"µs/km", 1e-6},
                                                  {"ns/km", 1e-9}};
  static const std::vector<Suffix> none = {};
  switch (kind) {
    case UnitKind::kTime: return time;
    case UnitKind::kAngle: return angle;
    case UnitKind::kAngularFrequency: return angular_frequency;
    case UnitKind::kRate: return rate;
    case UnitKind::kLossDb: return loss_db;
    case UnitKind::kLossDbPerKm: return loss_db_per_km;
    case UnitKind::kLengthKm: return length_km;
    case UnitKind::kTimePerKm: return time_per_km;
    case UnitKind::kDimensionless: return none;
  }
  return none;
}

}  // namespace

const char* unit_base_name(UnitKind kind) {
  switch (kind) {
    case UnitKind::kTime: return "s";
    case UnitKind::kAngle: return "rad";
    case UnitKind::kAngularFrequency: return "rad/s";
    case UnitKind::kRate: return "1/s";
    case UnitKind::kLossDb: return "dB";
    case UnitKind::kLossDbPerKm: return "dB/km";
    case UnitKind::kLengthKm: return "km";
    case UnitKind::kTimePerKm: return "s/km";
    case UnitKind::kDimensionless: return "";
  }
  return "";
}

double parse_quantity(const std::string& text, UnitKind kind,
                      const std::string& where) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  const char* begin = text.data() + i;
  const char* end = text.data() + text.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr == begin) {
    throw ConfigError(where + ": cannot parse quantity '" + text + "'");
  }
  std::size_t j = static_cast<std::size_t>(ptr - text.data());
  while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
  std::string unit = text.substr(j);
  while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.back()))) {
    unit.pop_back();
  }
  if (unit.empty()) return value;  // bare number = base unit
  for (const Suffix& s : suffixes_for(kind)) {
    if (unit == s.name) return value * s.factor;
  }
  throw ConfigError(where + ": unknown unit '" + unit + "' (expected " +
                    unit_base_name(kind) + "-family suffix)");
}

}  // namespace focksim
