#include "demkov/cli.hpp"

int main(int argc, char** argv) { return demkov::cli::main_entry(argc, argv); }
