#pragma once

#include <iostream>

namespace dynsindy::cli {

inline int run(const std::vector<std::string>& args) {
  (void)args;
  std::cerr << "dynsindy: not yet wired\n";
  return 1;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace dynsindy::cli
