#include "cli.hpp"

int main(int argc, char** argv) { return cmr::cli::run(argc, argv); }
