#include "renydiv/cli_io.hpp"

int main(int argc, char** argv) { return renydiv::run_cli(argc, argv); }
