#include "vfrl/cli.hpp"

int main(int argc, char** argv) { return vfrl::cli::run(argc, argv); }
