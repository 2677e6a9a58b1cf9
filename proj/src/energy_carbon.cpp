#include "fedcarbon/energy_carbon.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace fedcarbon {

namespace {

void require_non_negative(double value, const char* what) {
  if (!std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument(std::string(what) +
                                " must be finite and non-negative");
  }
}

}  // namespace

PowerDraw::PowerDraw(double watts) : watts_(watts) {
  require_non_negative(watts, "power draw");
}

Duration::Duration(double seconds) : seconds_(seconds) {
  require_non_negative(seconds, "duration");
}

Energy::Energy(double watt_hours) : watt_hours_(watt_hours) {
  require_non_negative(watt_hours, "energy");
}

Energy Energy::of(Duration time, PowerDraw power) {
  return Energy(time.hours() * power.watts());
}

EmissionFactor::EmissionFactor(std::string region_code, double kg_co2_per_kwh)
    : region_(std::move(region_code)), kg_per_kwh_(kg_co2_per_kwh) {
  if (!std::isfinite(kg_co2_per_kwh) || kg_co2_per_kwh <= 0.0) {
    throw std::invalid_argument("emission factor for '" + region_ +
                                "' must be positive");
  }
}

Pue::Pue(double ratio) : ratio_(ratio) {
  if (!std::isfinite(ratio) || ratio < 1.0) {
    throw std::invalid_argument("PUE must be >= 1.0");
  }
}

void FlRoundShape::validate() const {
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  if (clients_per_round < 1) {
    throw std::invalid_argument("clients_per_round must be >= 1");
  }
}

// Per-client energy is formed first so that objective_f with a zero
// communication overhead evaluates the identical expression.
Energy energy_fl(int clients, Duration round_time, PowerDraw client_power) {
  if (clients < 1) throw std::invalid_argument("clients must be >= 1");
  return Energy(clients * Energy::of(round_time, client_power).watt_hours());
}

Energy energy_centralized(Pue pue, Duration total_time, PowerDraw power) {
  return Energy(pue.ratio() * Energy::of(total_time, power).watt_hours());
}

double co2_fl(const FlRoundShape& shape, const EmissionFactor& factor) {
  shape.validate();
  const Energy per_round =
      energy_fl(shape.clients_per_round, shape.round_time, shape.client_power);
  return shape.rounds * factor.kg_co2_per_kwh() * per_round.watt_hours();
}

double co2_centralized(Pue pue, Duration total_time, PowerDraw power,
                       const EmissionFactor& factor) {
  return factor.grams_for(energy_centralized(pue, total_time, power));
}

}  // namespace fedcarbon
