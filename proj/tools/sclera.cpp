#include "cli.hpp"

int main(int argc, char** argv) { return sclera::cli::run(argc, argv); }
