#include "ggm/cli.hpp"

int main(int argc, char** argv) { return ggm::run_cli(argc, argv); }
