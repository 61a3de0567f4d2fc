#include "catenc/cli.hpp"

int main(int argc, char** argv) { return catenc::cli::run(argc, argv); }
