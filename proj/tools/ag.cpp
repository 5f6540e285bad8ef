#include "actgov/cli.hpp"

int main(int argc, char** argv) { return actgov::cli::run(argc, argv); }
