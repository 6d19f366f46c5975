#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <numeric>
#include <string>

#include "battmpc/market_data.hpp"

using namespace battmpc;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() / ("battmpc_md_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv");
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::error_code ec; std::filesystem::remove(path, ec); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("fr signal loads a complete hour of zeros") {
  std::string csv = "hour,step,alpha\n";
  for (int s = 1; s <= 4; ++s) csv += "1," + std::to_string(s) + ",0.0\n";
  TempFile f(csv);
  const auto hours = load_fr_signal(f.str());
  REQUIRE(hours.size() == 1);
  REQUIRE(hours[0].size() == 4);
  for (double a : hours[0]) CHECK(a == 0.0);
}

TEST_CASE("fr signal rejects out-of-range alpha") {
  TempFile f("hour,step,alpha\n1,1,0.0\n1,2,1.5\n");
  CHECK_THROWS_AS(load_fr_signal(f.str()), RangeError);
}

TEST_CASE("fr signal names the missing step") {
  std::string csv = "hour,step,alpha\n";
  for (int h = 1; h <= 3; ++h)
    for (int s = 1; s <= 3; ++s)
      if (!(h == 2 && s == 2)) csv += std::to_string(h) + "," + std::to_string(s) + ",0.1\n";
  TempFile f(csv);
  try {
    load_fr_signal(f.str());
    FAIL("expected GapError");
  } catch (const GapError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("hour 2") != std::string::npos);
    CHECK(msg.find("step 2") != std::string::npos);
  }
}

TEST_CASE("prices load and reject bad series") {
  std::string csv = "hour,fr_price,energy_price\n";
  for (int h = 1; h <= 24; ++h) csv += std::to_string(h) + ",30.5,-2.25\n";
  TempFile ok(csv);
  const auto ps = load_prices(ok.str());
  CHECK(ps.fr_price.size() == 24);
  CHECK(ps.energy_price[0] == -2.25);  // negative energy prices are legal

  TempFile neg("hour,fr_price,energy_price\n1,-1,20\n");
  CHECK_THROWS_AS(load_prices(neg.str()), RangeError);

  TempFile dup("hour,fr_price,energy_price\n1,30,20\n1,31,21\n");
  CHECK_THROWS_AS(load_prices(dup.str()), AlignmentError);
}

TEST_CASE("window slices with wraparound") {
  MarketData d;
  d.steps_per_hour = 2;
  for (int h = 0; h < 3; ++h) {
    d.alpha.push_back({0.1 * h, -0.1 * h});
    d.fr_price.push_back(10.0 + h);
    d.energy_price.push_back(20.0 + h);
  }
  const auto w0 = window(d, 0, 1);
  CHECK(w0.fr_price[0] == 10.0);
  CHECK(w0.alpha[0][0] == 0.0);

  const auto w = window(d, 2, 2);  // hours 3 and (wrapped) 1
  CHECK(w.fr_price[0] == 12.0);
  CHECK(w.fr_price[1] == 10.0);

  SUBCASE("concatenating unit windows equals the wide window") {
    for (long t = 0; t < 3; ++t) {
      const auto wide = window(d, t, 5);
      for (int k = 0; k < 5; ++k) {
        const auto unit = window(d, t + k, 1);
        CHECK(unit.fr_price[0] == wide.fr_price[k]);
        CHECK(unit.energy_price[0] == wide.energy_price[k]);
        CHECK(unit.alpha[0].data() == wide.alpha[k].data());
      }
    }
  }
}

TEST_CASE("synthetic fr signal: deterministic, bounded, near-zero hourly means") {
  const auto a = synth_fr(42, 3, 1800);
  const auto b = synth_fr(42, 3, 1800);
  CHECK(a == b);

  const auto big = synth_fr(7, 1000, 60);
  int ok_mean = 0;
  bool saturated = false;
  for (const auto& hour : big) {
    double m = 0.0;
    for (double v : hour) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
      if (std::abs(v) > 0.9) saturated = true;
      m += v;
    }
    m /= hour.size();
    if (std::abs(m) <= 0.2) ++ok_mean;
  }
  CHECK(ok_mean >= 950);
  CHECK(saturated);
}

TEST_CASE("market data round-trips bit-exactly through CSV") {
  const auto alpha = synth_fr(3, 2, 30);
  const auto prices = synth_prices(3, 2);
  const auto tmp = std::filesystem::temp_directory_path();
  const auto fr_path = (tmp / "battmpc_rt_fr.csv").string();
  const auto pr_path = (tmp / "battmpc_rt_prices.csv").string();
  write_fr_signal(fr_path, alpha);
  write_prices(pr_path, prices);
  const auto loaded = load_market_data(fr_path, pr_path);
  CHECK(loaded.alpha == alpha);
  CHECK(loaded.fr_price == prices.fr_price);
  CHECK(loaded.energy_price == prices.energy_price);
  std::filesystem::remove(fr_path);
  std::filesystem::remove(pr_path);
}

TEST_CASE("market data assembly enforces alignment") {
  auto alpha = synth_fr(1, 3, 10);
  auto prices = synth_prices(1, 2);
  CHECK_THROWS_AS(assemble_market_data(alpha, prices), AlignmentError);
}
