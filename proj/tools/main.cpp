#include "hazsync/cli.hpp"

int main(int argc, char** argv) { return hazsync::cli::run(argc, argv); }
