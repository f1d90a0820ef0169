// Minimal library usage: cluster two Gaussian blobs and print the report.

#include <iostream>
#include <vector>

#include "cdpp/cdpp.hpp"

int main() {
  cdpp::RngStream rng(42, 0);
  cdpp::RowMatrix x(100, 2);
  std::vector<int> truth(100);
  for (int i = 0; i < 100; ++i) {
    const double cx = i < 50 ? 0.0 : 10.0;
    x(i, 0) = cx + rng.normal();
    x(i, 1) = rng.normal();
    truth[i] = i < 50 ? 0 : 1;
  }

  cdpp::PipelineConfig cfg;  // DPP sampling, R = 200, tau = 0.6, a = 1/2, s = 1
  const auto report = cdpp::run_pipeline(cdpp::DataMatrix(x), cfg, truth);
  cdpp::print_summary(std::cout, report);
  return 0;
}
