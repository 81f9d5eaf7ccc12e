#include <spdiag/cli.hpp>

int main(int argc, char** argv) { return spdiag::cli::main(argc, argv); }
