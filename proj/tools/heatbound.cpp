#include "heatbound/cli.hpp"

int main(int argc, char** argv) { return heatbound::cli::run(argc, argv); }
