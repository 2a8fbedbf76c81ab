#include "tbrain/cli.hpp"

int main(int argc, char** argv) { return tbrain::run_cli(argc, argv); }
