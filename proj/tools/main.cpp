#include "rabic/cli.hpp"

int main(int argc, char** argv) { return rabic::cli::main_entry(argc, argv); }
