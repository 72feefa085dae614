// Writes the bundled synthetic price panel.
//
// Four assets, weekdays from 2014-01-02 to 2018-01-30 (no holiday calendar),
// daily simple returns drawn i.i.d. from N(mu, Sigma) with
//   mu    = [6, 9, 7, 5] * 1e-4
//   vol   = [1.4, 1.8, 1.5, 1.2] * 1e-2
//   corr  = 0.4 between every pair,
// starting every price at 100. Seed 20180102, stream 0.

#include <chrono>
#include <fstream>
#include <iostream>

#include <fmt/format.h>

#include "blbayes/data.hpp"
#include "blbayes/sampling.hpp"

int main(int argc, char** argv) {
  using namespace blbayes;
  using namespace std::chrono;
  const std::string out_path = argc > 1 ? argv[1] : "demo_prices.csv";

  Vector mu(4);
  mu << 6e-4, 9e-4, 7e-4, 5e-4;
  Vector vol(4);
  vol << 0.014, 0.018, 0.015, 0.012;
  Matrix corr = Matrix::Constant(4, 4, 0.4);
  corr.diagonal().setOnes();
  const SpdMatrix cov(Matrix(vol.asDiagonal() * corr * vol.asDiagonal()));

  RngStream rng(20180102, 0);
  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 1;
  }
  out << "date,AAA,BBB,CCC,DDD\n";
  Vector price = Vector::Constant(4, 100.0);
  const sys_days last{year{2018} / January / 30};
  bool first = true;
  for (sys_days day{year{2014} / January / 2}; day <= last; day += days{1}) {
    const weekday wd{day};
    if (wd == Saturday || wd == Sunday) continue;
    if (!first) price.array() *= 1.0 + sample_mvn(mu, cov, rng).array();
    first = false;
    out << format_date(year_month_day{day});
    for (Index i = 0; i < 4; ++i) out << fmt::format(",{:.6f}", price(i));
    out << '\n';
  }
  return 0;
}
