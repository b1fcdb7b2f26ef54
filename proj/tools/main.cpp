#include "vins/cli.hpp"

int main(int argc, char** argv) { return vins::cli::run(argc, argv); }
