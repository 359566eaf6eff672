#include <string>
#include <vector>

#include "chl/cli.hpp"

int main(int argc, char** argv) {
  return chl::run_cli(std::vector<std::string>(argv, argv + argc));
}
