#include "rroff/cli.hpp"

int main(int argc, char** argv) { return rroff::cli::run(argc, argv); }
