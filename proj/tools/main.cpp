#include "stlgcp/cli.hpp"

int main(int argc, char** argv) { return stlgcp::run_cli(argc, argv); }
