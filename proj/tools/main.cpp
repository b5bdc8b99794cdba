#include "nlwave/cli.hpp"

int main(int argc, char** argv) { return nlwave::cli::run(argc, argv); }
