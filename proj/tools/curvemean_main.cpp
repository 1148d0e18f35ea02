#include "curvemean/cli.hpp"

int main(int argc, char** argv) { return curvemean::cli::run(argc, argv); }
