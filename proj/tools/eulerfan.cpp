#include "eulerfan/cli/cli.hpp"

int main(int argc, char** argv) { return eulerfan::run_cli(argc, argv); }
