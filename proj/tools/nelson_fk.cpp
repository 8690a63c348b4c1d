#include "nelson/cli.hpp"

int main(int argc, char** argv) { return nelson::cli::run(argc, argv); }
