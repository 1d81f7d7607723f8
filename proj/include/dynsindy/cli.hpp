#pragma once

#include <string>
#include <vector>

namespace dynsindy::cli {

int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace dynsindy::cli

#include "dynsindy/cli_impl.hpp"
