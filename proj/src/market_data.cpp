#include "battmpc/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "battmpc/num_format.hpp"

namespace battmpc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

void expect_header(const std::string& line, const std::vector<std::string>& names, const std::string& path) {
  const auto cols = split_csv_line(line);
  if (cols.size() != names.size()) throw ParseError(path + ": expected header with " + std::to_string(names.size()) + " columns");
  for (std::size_t i = 0; i < names.size(); ++i)
    if (trim(cols[i]) != names[i]) throw ParseError(path + ": expected header column '" + names[i] + "', got '" + trim(cols[i]) + "'");
}

// Deterministic, implementation-independent RNG primitives (std distributions
// are not bit-portable across standard libraries).
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed + 0x9E3779B97F4A7C15ull) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  long uniform_int(long lo, long hi) {  // inclusive bounds
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    // Box-Muller; one draw per call keeps the stream simple and reproducible
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
};

}  // namespace

std::vector<std::vector<double>> load_fr_signal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  expect_header(line, {"hour", "step", "alpha"}, path);

  std::vector<std::vector<double>> hours;
  long cur_hour = 0;
  long expected_step = 1;
  long steps_per_hour = -1;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != 3) throw ParseError(path + ":" + std::to_string(row) + ": expected 3 columns");
    long hour = 0, step_idx = 0;
    double a = 0.0;
    if (!parse_long(cols[0], hour) || !parse_long(cols[1], step_idx) || !parse_double(cols[2], a))
      throw ParseError(path + ":" + std::to_string(row) + ": malformed row");
    if (!(a >= -1.0 && a <= 1.0))
      throw RangeError(path + ":" + std::to_string(row) + ": alpha " + format_double(a) + " outside [-1,1]");

    if (hour != cur_hour) {
      // close previous hour
      if (cur_hour != 0) {
        if (steps_per_hour < 0) steps_per_hour = expected_step - 1;
        if (expected_step - 1 != steps_per_hour)
          throw GapError(path + ": hour " + std::to_string(cur_hour) + " has " + std::to_string(expected_step - 1) +
                         " steps, expected " + std::to_string(steps_per_hour));
      }
      if (hour != cur_hour + 1)
        throw GapError(path + ":" + std::to_string(row) + ": hour " + std::to_string(cur_hour + 1) +
                       " missing (got hour " + std::to_string(hour) + ")");
      cur_hour = hour;
      expected_step = 1;
      hours.emplace_back();
    }
    if (step_idx != expected_step)
      throw GapError(path + ":" + std::to_string(row) + ": hour " + std::to_string(hour) + " step " +
                     std::to_string(expected_step) + " missing (got step " + std::to_string(step_idx) + ")");
    hours.back().push_back(a);
    ++expected_step;
  }
  if (hours.empty()) throw ParseError(path + ": no data rows");
  if (steps_per_hour < 0) steps_per_hour = expected_step - 1;
  if (expected_step - 1 != steps_per_hour)
    throw GapError(path + ": hour " + std::to_string(cur_hour) + " has " + std::to_string(expected_step - 1) +
                   " steps, expected " + std::to_string(steps_per_hour));
  return hours;
}

PriceSeries load_prices(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  expect_header(line, {"hour", "fr_price", "energy_price"}, path);

  PriceSeries ps;
  long row = 1;
  long expected_hour = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cols = split_csv_line(line);
    if (cols.size() != 3) throw ParseError(path + ":" + std::to_string(row) + ": expected 3 columns");
    long hour = 0;
    double pf = 0.0, pe = 0.0;
    if (!parse_long(cols[0], hour) || !parse_double(cols[1], pf) || !parse_double(cols[2], pe))
      throw ParseError(path + ":" + std::to_string(row) + ": malformed row");
    if (hour != expected_hour)
      throw AlignmentError(path + ":" + std::to_string(row) + ": expected hour " + std::to_string(expected_hour) +
                           ", got " + std::to_string(hour));
    if (pf < 0.0) throw RangeError(path + ":" + std::to_string(row) + ": FR capacity price must be >= 0");
    ps.fr_price.push_back(pf);
    ps.energy_price.push_back(pe);
    ++expected_hour;
  }
  if (ps.fr_price.empty()) throw ParseError(path + ": no data rows");
  return ps;
}

MarketData assemble_market_data(std::vector<std::vector<double>> alpha, PriceSeries prices) {
  if (alpha.empty()) throw AlignmentError("market data: no FR hours");
  if (alpha.size() != prices.fr_price.size())
    throw AlignmentError("market data: " + std::to_string(alpha.size()) + " FR-signal hours vs " +
                         std::to_string(prices.fr_price.size()) + " price hours");
  MarketData d;
  d.steps_per_hour = static_cast<int>(alpha.front().size());
  for (const auto& h : alpha) {
    if (static_cast<int>(h.size()) != d.steps_per_hour) throw AlignmentError("market data: ragged FR hours");
    for (double a : h)
      if (!(a >= -1.0 && a <= 1.0)) throw RangeError("market data: alpha outside [-1,1]");
  }
  d.alpha = std::move(alpha);
  d.fr_price = std::move(prices.fr_price);
  d.energy_price = std::move(prices.energy_price);
  return d;
}

MarketData load_market_data(const std::string& fr_path, const std::string& prices_path) {
  return assemble_market_data(load_fr_signal(fr_path), load_prices(prices_path));
}

HorizonSlice window(const MarketData& data, long t, int horizon) {
  if (horizon < 1) throw std::invalid_argument("window: horizon must be >= 1");
  const long y = data.hours();
  HorizonSlice s;
  s.alpha.reserve(horizon);
  s.fr_price.reserve(horizon);
  s.energy_price.reserve(horizon);
  for (int k = 0; k < horizon; ++k) {
    const long idx = ((t + k) % y + y) % y;  // hour t+1+k, 0-based with wrap
    s.alpha.emplace_back(data.alpha[idx]);
    s.fr_price.push_back(data.fr_price[idx]);
    s.energy_price.push_back(data.energy_price[idx]);
  }
  return s;
}

std::vector<std::vector<double>> synth_fr(std::uint64_t seed, int hours, int steps_per_hour) {
  // generate near the 2 s native resolution and block-average down to the
  // requested rate so hourly statistics do not depend on steps_per_hour
  const int k = static_cast<int>(std::max(1L, std::lround(1800.0 / steps_per_hour)));
  const int base = steps_per_hour * k;

  std::vector<std::vector<double>> out;
  out.reserve(hours);
  Rng rng(seed);
  double x = 0.0, y = 0.0, jump = 0.0;
  long jump_left = 0;
  std::vector<double> fine(base);
  for (int h = 0; h < hours; ++h) {
    for (int s = 0; s < base; ++s) {
      if (jump_left > 0) {
        --jump_left;
      } else {
        jump = 0.0;
        if (rng.uniform() < 0.006) {
          jump = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.6, 1.3);
          jump_left = rng.uniform_int(8, 44);
        }
      }
      x = 0.90 * x + 0.30 * rng.normal() - 28.0 * y;
      fine[s] = std::clamp(x + jump - 28.0 * y, -1.0, 1.0);
      y += fine[s] / base;
    }
    std::vector<double> hour(steps_per_hour);
    for (int s = 0; s < steps_per_hour; ++s) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) acc += fine[s * k + j];
      hour[s] = acc / k;
    }
    out.push_back(std::move(hour));
    y = 0.0;  // each hour starts energy-neutral
  }
  return out;
}

PriceSeries synth_prices(std::uint64_t seed, int hours) {
  Rng rng(seed ^ 0xA5A5A5A5F00DF00Dull);
  PriceSeries ps;
  ps.fr_price.reserve(hours);
  ps.energy_price.reserve(hours);
  for (int h = 0; h < hours; ++h) {
    const double pf = std::clamp(std::exp(std::log(30.0) + 0.5 * rng.normal()), 0.5, 400.0);
    const double shape = std::sin(2.0 * M_PI * ((h % 24) - 6.0) / 24.0);
    const double pe = 30.0 + 12.0 * shape + 4.0 * rng.normal();
    ps.fr_price.push_back(pf);
    ps.energy_price.push_back(pe);
  }
  return ps;
}

void write_fr_signal(const std::string& path, const std::vector<std::vector<double>>& alpha) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_fr_signal: cannot open " + path);
  out << "hour,step,alpha\n";
  for (std::size_t h = 0; h < alpha.size(); ++h)
    for (std::size_t s = 0; s < alpha[h].size(); ++s)
      out << (h + 1) << ',' << (s + 1) << ',' << format_double(alpha[h][s]) << '\n';
}

void write_prices(const std::string& path, const PriceSeries& prices) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_prices: cannot open " + path);
  out << "hour,fr_price,energy_price\n";
  for (std::size_t h = 0; h < prices.fr_price.size(); ++h)
    out << (h + 1) << ',' << format_double(prices.fr_price[h]) << ',' << format_double(prices.energy_price[h]) << '\n';
}

}  // namespace battmpc
