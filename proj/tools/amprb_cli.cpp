#include "amprb/cli.hpp"

int main(int argc, char** argv) { return amprb::cli::run(argc, argv); }
