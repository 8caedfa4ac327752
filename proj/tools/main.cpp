#include "cli.hpp"

int main(int argc, char** argv) { return alrs::cli::main(argc, argv); }
