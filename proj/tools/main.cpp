#include "stratoctl/commands.hpp"

int main(int argc, char** argv) { return stratoctl::cli::run(argc, argv); }
