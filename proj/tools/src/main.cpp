#include <cstdlib>
#include <iostream>

#include "sdgame/cli.hpp"

int main(int argc, char** argv) {
  return sdgame::cli::main_entry(argc, argv, std::cout, std::cerr, [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  });
}
