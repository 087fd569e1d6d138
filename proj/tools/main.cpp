#include "cli.hpp"

int main(int argc, char** argv) { return polykde::cli::run(argc, argv); }
