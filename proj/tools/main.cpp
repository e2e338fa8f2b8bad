#include <iostream>
#include <string>
#include <vector>

#include "cli_lib.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string out;
  std::string err;
  const int rc = robann::cli::run_cli(args, out, err);
  std::cout << out;
  std::cerr << err;
  return rc;
}
