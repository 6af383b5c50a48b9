#include "sopf_cli/commands.hpp"

int main(int argc, char** argv) { return sopf::cli::run_cli(argc, argv); }
