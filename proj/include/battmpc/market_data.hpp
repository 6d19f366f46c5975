#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace battmpc {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class RangeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class GapError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class AlignmentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Aligned FR-signal and price series. Hour indices are 1-based in files,
/// 0-based in memory. Immutable after assembly.
struct MarketData {
  std::vector<std::vector<double>> alpha;  // per hour, length steps_per_hour, values in [-1,1]
  std::vector<double> fr_price;            // $/MW per hour
  std::vector<double> energy_price;        // $/MWh per hour
  int steps_per_hour = 0;

  int hours() const { return static_cast<int>(alpha.size()); }
};

/// One receding-horizon window: hours t+1 .. t+N with wraparound.
struct HorizonSlice {
  std::vector<std::span<const double>> alpha;
  std::vector<double> fr_price;
  std::vector<double> energy_price;
};

/// CSV schema: header "hour,step,alpha"; 1-based contiguous hours and steps.
std::vector<std::vector<double>> load_fr_signal(const std::string& path);

struct PriceSeries {
  std::vector<double> fr_price;
  std::vector<double> energy_price;
};

/// CSV schema: header "hour,fr_price,energy_price"; 1-based contiguous hours.
/// Negative energy prices are allowed, negative FR prices are not.
PriceSeries load_prices(const std::string& path);

/// Validates alignment (equal hour counts, alpha in [-1,1], uniform step count).
MarketData assemble_market_data(std::vector<std::vector<double>> alpha, PriceSeries prices);

MarketData load_market_data(const std::string& fr_path, const std::string& prices_path);

/// Hours t+1..t+N; indices wrap modulo the loaded horizon (data replication).
HorizonSlice window(const MarketData& data, long t, int horizon);

/// Reproducible band-limited FR signal in [-1,1]: integral-regulated AR(1)
/// with sparse saturation spells, near-zero hourly means.
std::vector<std::vector<double>> synth_fr(std::uint64_t seed, int hours, int steps_per_hour);

/// Reproducible price fixture: lognormal FR capacity prices around 30 $/MW,
/// day-shaped energy prices around 30 $/MWh.
PriceSeries synth_prices(std::uint64_t seed, int hours);

void write_fr_signal(const std::string& path, const std::vector<std::vector<double>>& alpha);
void write_prices(const std::string& path, const PriceSeries& prices);

}  // namespace battmpc
