/* SPDX-License-Identifier: Apache-2.0 */

/** Evaluation arithmetic: battery life, bill-of-materials cost, SUS. */

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dial/beacon.hpp"

namespace dial {

struct BatterySpec {
  int cells = 3;
  double per_cell_min_mAh = 2000.0;
  double per_cell_max_mAh = 3000.0;
};

/// capacity / current / 24.  Throws Error{ZeroCurrent} for current <= 0 and
/// Error{InvalidArgument} for capacity <= 0.
double battery_life_days(double capacity_mAh, double current_mA);

struct BatteryBounds {
  double min_days;
  double max_days;
};

BatteryBounds battery_bounds(const BatterySpec& spec, double current_mA);

/// Whole cents.
struct Usd {
  std::int64_t cents = 0;

  double value() const { return static_cast<double>(cents) / 100.0; }
  /// "21.66"
  std::string str() const;
  auto operator<=>(const Usd&) const = default;
};

struct BomItem {
  std::string name;
  double unit_price_usd = 0.0;
  int quantity = 1;
};

/// Sum of price x quantity, rounded half-up to cents.  Throws
/// Error{InvalidArgument} for negative prices or quantity < 1.
Usd bom_cost(std::span<const BomItem> items);

/// Bill of materials for each tag model.
std::vector<BomItem> reference_bom(Model model);

/// Idle current used for battery estimates: 1 mA BLE-AC, 75 mA UWB-RAW.
double reference_current(Model model);

/// Ten answers in [1, 5], questions in order.  Odd questions contribute
/// (answer - 1), even ones (5 - answer); the sum is scaled by 2.5.  Throws
/// Error{WrongQuestionCount} or Error{OutOfRangeAnswer}.
double sus_score(std::span<const double> answers);

/// Published per-question averages from the user study.
inline constexpr std::array<double, 10> kStudySusAverages = {4.43, 1.30, 4.78, 1.61, 4.74,
                                                              1.35, 4.52, 1.48, 4.74, 1.56};

}  // namespace dial
