#include "hawkes_vb/cli.hpp"

int main(int argc, char** argv) { return hawkes_vb::cli::run(argc, argv); }
