#include <iostream>
#include <sstream>

#include "nipoly/acceptance.hpp"

// Runs every acceptance criterion and prints one line per criterion.
// Optional argument: comma-separated ids to restrict the run.
int main(int argc, char** argv) {
  nipoly::AcceptanceOptions opt;
  if (argc > 1) {
    std::stringstream ss(argv[1]);
    std::string tok;
    while (std::getline(ss, tok, ',')) opt.only.insert(std::stoi(tok));
  }
  opt.on_result = [](const nipoly::CriterionResult& r) { nipoly::print_result(std::cout, r); std::cout.flush(); };
  const auto results = nipoly::run_acceptance(opt);
  int pass = 0;
  for (const auto& r : results) pass += r.pass;
  std::cout << pass << "/" << results.size() << " criteria passed\n";
  return nipoly::acceptance_ok(results) ? 0 : 1;
}
