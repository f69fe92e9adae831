#include "annkit/cli.hpp"

int main(int argc, char** argv) { return annkit::run_cli(argc, argv); }
