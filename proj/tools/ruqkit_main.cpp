#include "ruqkit/cli.hpp"

int main(int argc, char** argv) { return ruqkit::cli::run(argc, argv); }
