#include "cli.hpp"

int main(int argc, char** argv) { return ldme::run_cli(argc, argv); }
