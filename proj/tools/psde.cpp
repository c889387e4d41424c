#include "psde/cli.hpp"

int main(int argc, char** argv) { return psde::cli::run(argc, argv); }
