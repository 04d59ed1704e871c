#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emob {

using NodeId = std::int32_t;

// Expansion/tie-break order is the enum order: Walk, EScooter, EBike, ECar.
enum class Mode : std::uint8_t { Walk = 0, EScooter = 1, EBike = 2, ECar = 3 };

inline constexpr int kNumModes = 4;

inline constexpr std::array<Mode, kNumModes> kAllModes = {
    Mode::Walk, Mode::EScooter, Mode::EBike, Mode::ECar};

inline constexpr std::array<Mode, 3> kVehicleModes = {Mode::EScooter, Mode::EBike,
                                                      Mode::ECar};

template <typename T>
using PerMode = std::array<T, kNumModes>;

constexpr int mode_index(Mode m) { return static_cast<int>(m); }

constexpr bool is_vehicle(Mode m) { return m != Mode::Walk; }

constexpr const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Walk: return "walk";
    case Mode::EScooter: return "escooter";
    case Mode::EBike: return "ebike";
    case Mode::ECar: return "ecar";
  }
  return "?";
}

std::optional<Mode> mode_from_name(std::string_view name);

// Canonical label for the set of modes an itinerary uses, e.g. "ecar+walk".
// Members are sorted by name, matching the usual reporting labels.
std::string mode_set_label(const std::array<bool, kNumModes>& used);
std::string mode_set_label(const std::vector<Mode>& modes);

}  // namespace emob
