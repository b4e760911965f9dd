#include "gadqs/cli.hpp"

int main(int argc, char** argv) { return gadqs::cli::run(argc, argv); }
