#include "socsamp/cli.hpp"

int main(int argc, char** argv) { return socsamp::run_cli(argc, argv); }
