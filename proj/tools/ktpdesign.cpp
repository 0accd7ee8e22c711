#include "ktp/cli.hpp"

int main(int argc, char** argv) { return ktp::cli::main(argc, argv); }
