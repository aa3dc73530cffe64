#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "conetrace/errors.hpp"
#include "conetrace/spectral_compare.hpp"

// Writes the frequencies of a doubled rectangle in the format read by
// `conetrace compare --eigs`.
int main(int argc, char** argv) {
  CLI::App app{"frequencies of the doubled width x height rectangle", "rectangle_frequencies"};
  double width = 1.0, height = 1.0, lambda_max = 400.0;
  app.add_option("--width", width, "rectangle width");
  app.add_option("--height", height, "rectangle height");
  app.add_option("--lambda-max", lambda_max, "largest frequency");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 64);
  }
  try {
    auto f = conetrace::doubled_rectangle_frequencies(width, height, lambda_max);
    std::printf("# %s, lambda <= %.17g, %zu frequencies\n", f.source.c_str(), lambda_max, f.values.size());
    for (double v : f.values) std::printf("%.17g\n", v);
  } catch (const conetrace::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
