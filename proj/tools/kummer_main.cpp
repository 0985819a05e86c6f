#include "kummer/cli.hpp"

int main(int argc, char** argv) { return kummer::cli::run_cli(argc, argv); }
