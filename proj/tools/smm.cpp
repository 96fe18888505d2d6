#include "smm/cli.hpp"

int main(int argc, char** argv) { return smm::run_cli(argc, argv); }
