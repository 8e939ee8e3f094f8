#include <string>
#include <vector>

#include "sectoropt/cli.hpp"

int main(int argc, char** argv) {
    return sectoropt::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
