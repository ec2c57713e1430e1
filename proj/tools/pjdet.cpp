#include <string>
#include <vector>

#include "pjdet/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pjdet::cli::run_cli(std::move(args));
}
