#include "morphline/cli.hpp"

int main(int argc, char** argv) { return morphline::run_cli(argc, argv); }
