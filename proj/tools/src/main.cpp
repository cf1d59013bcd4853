#include "dhp_cli/cli.hpp"

int main(int argc, char** argv) { return dhp::cli::run(argc, argv); }
