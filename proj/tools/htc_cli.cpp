#include "htc/cli.hpp"

int main(int argc, char** argv) { return htc::cli_main(argc, argv); }
