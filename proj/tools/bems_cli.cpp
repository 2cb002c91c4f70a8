#include "bems/cli.hpp"

int main(int argc, char** argv) { return bems::run_command(argc, argv); }
