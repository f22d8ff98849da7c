/* SPDX-License-Identifier: Apache-2.0 */

#include "dial/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "dial/error.hpp"

namespace dial {

double battery_life_days(double capacity_mAh, double current_mA) {
  if (!(current_mA > 0.0)) throw Error(ErrorCode::ZeroCurrent, "current must be > 0");
  if (!(capacity_mAh > 0.0)) throw Error(ErrorCode::InvalidArgument, "capacity must be > 0");
  return capacity_mAh / current_mA / 24.0;
}

BatteryBounds battery_bounds(const BatterySpec& spec, double current_mA) {
  if (spec.cells < 1 || !(spec.per_cell_min_mAh > 0.0) ||
      spec.per_cell_min_mAh > spec.per_cell_max_mAh) {
    throw Error(ErrorCode::InvalidArgument, "battery spec needs cells >= 1 and 0 < min <= max");
  }
  return {battery_life_days(spec.cells * spec.per_cell_min_mAh, current_mA),
          battery_life_days(spec.cells * spec.per_cell_max_mAh, current_mA)};
}

std::string Usd::str() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%lld.%02lld", cents < 0 ? "-" : "",
                static_cast<long long>(std::llabs(cents) / 100),
                static_cast<long long>(std::llabs(cents) % 100));
  return buf;
}

Usd bom_cost(std::span<const BomItem> items) {
  double total = 0.0;
  for (const auto& item : items) {
    if (!(item.unit_price_usd >= 0.0) || item.quantity < 1) {
      throw Error(ErrorCode::InvalidArgument, "bad BOM item " + item.name);
    }
    total += item.unit_price_usd * item.quantity;
  }
  // Nudge absorbs binary representation error before rounding half-up.
  return Usd{static_cast<std::int64_t>(std::floor(total * 100.0 + 0.5 + 1e-7))};
}

std::vector<BomItem> reference_bom(Model model) {
  if (model == Model::UwbRaw) {
    return {{"Qorvo DWM1001-DEV board", 19.50, 1}, {"NFC coin tag", 0.76, 1}};
  }
  return {{"Adafruit ItsyBitsy nRF52840 Express", 19.95, 1},
          {"magnetic buzzer", 0.95, 1},
          {"NFC coin tag", 0.76, 1}};
}

double reference_current(Model model) { return model == Model::UwbRaw ? 75.0 : 1.0; }

double sus_score(std::span<const double> answers) {
  if (answers.size() != 10) {
    throw Error(ErrorCode::WrongQuestionCount,
                "expected 10 answers, got " + std::to_string(answers.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    const double v = answers[i];
    if (!(v >= 1.0 && v <= 5.0)) {
      throw Error(ErrorCode::OutOfRangeAnswer, "answer " + std::to_string(i + 1) + " is outside [1, 5]");
    }
    // Question 1 is index 0.
    sum += (i % 2 == 0) ? (v - 1.0) : (5.0 - v);
  }
  return 2.5 * sum;
}

}  // namespace dial
