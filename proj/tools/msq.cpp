#include <string>
#include <vector>

#include "msq/cli.hpp"

int main(int argc, char** argv) {
  return msq::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
