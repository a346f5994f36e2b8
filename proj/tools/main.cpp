#include "holonomy/cli.hpp"

int main(int argc, char** argv) {
  return holonomy::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
