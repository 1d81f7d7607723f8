#include "dynsindy/cli.hpp"

int main(int argc, char** argv) { return dynsindy::cli::run(argc, argv); }
