#include "gsq/cli.hpp"

int main(int argc, char** argv) { return gsq::cli_main(argc, argv); }
