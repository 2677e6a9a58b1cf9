#pragma once

// Energy and CO2 accounting for federated and centralized training.
//
// Units: power in watts, durations in seconds, energy in watt-hours and
// emission factors in kg CO2 per kWh. Since kg/kWh == g/Wh, multiplying an
// emission factor by an Energy yields grams of CO2 directly.

#include <string>

namespace fedcarbon {

class PowerDraw {
 public:
  PowerDraw() = default;
  explicit PowerDraw(double watts);
  double watts() const { return watts_; }

 private:
  double watts_ = 0.0;
};

class Duration {
 public:
  Duration() = default;
  explicit Duration(double seconds);
  double seconds() const { return seconds_; }
  double hours() const { return seconds_ / 3600.0; }

 private:
  double seconds_ = 0.0;
};

class Energy {
 public:
  Energy() = default;
  explicit Energy(double watt_hours);
  double watt_hours() const { return watt_hours_; }

  /// Energy of running a load of `power` for `time`: seconds / 3600 * watts.
  static Energy of(Duration time, PowerDraw power);

  Energy& operator+=(const Energy& other) {
    watt_hours_ += other.watt_hours_;
    return *this;
  }

 private:
  double watt_hours_ = 0.0;
};

class EmissionFactor {
 public:
  EmissionFactor(std::string region_code, double kg_co2_per_kwh);
  const std::string& region_code() const { return region_; }
  double kg_co2_per_kwh() const { return kg_per_kwh_; }

  /// Grams of CO2 released when `energy` is drawn from this grid.
  double grams_for(Energy energy) const {
    return kg_per_kwh_ * energy.watt_hours();
  }

  friend bool operator==(const EmissionFactor&, const EmissionFactor&) = default;

 private:
  std::string region_;
  double kg_per_kwh_;
};

/// Power usage effectiveness of a data center (>= 1).
class Pue {
 public:
  Pue() = default;
  explicit Pue(double ratio);
  double ratio() const { return ratio_; }

  static Pue world_average() { return Pue(1.67); }
  static Pue google() { return Pue(1.11); }
  static Pue amazon() { return Pue(1.2); }
  static Pue microsoft() { return Pue(1.125); }

 private:
  double ratio_ = 1.0;
};

struct FlRoundShape {
  int rounds = 1;
  int clients_per_round = 1;
  Duration round_time;
  PowerDraw client_power;

  /// Throws std::invalid_argument when rounds or clients_per_round < 1.
  void validate() const;
};

/// Energy of a single FL round: n clients each drawing `e` for `t`.
Energy energy_fl(int clients, Duration round_time, PowerDraw client_power);

/// Data-center energy of a training job lasting `total_time`, scaled by PUE.
Energy energy_centralized(Pue pue, Duration total_time, PowerDraw power);

/// Grams of CO2 for a whole FL run: rounds * factor * energy_fl(n, t, e).
double co2_fl(const FlRoundShape& shape, const EmissionFactor& factor);

/// Grams of CO2 for a centralized run; `total_time` covers all epochs.
double co2_centralized(Pue pue, Duration total_time, PowerDraw power,
                       const EmissionFactor& factor);

}  // namespace fedcarbon
