#include "gwtree/cli.hpp"

int main(int argc, char** argv) { return gwtree::cli::main(argc, argv); }
