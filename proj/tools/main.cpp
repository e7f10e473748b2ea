#include "sigcoord/cli.hpp"

int main(int argc, char** argv) { return sigcoord::cli_main(argc, argv); }
